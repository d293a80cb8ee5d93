"""Graph storage, file formats, permutations and component utilities.

Node indices are 0-based everywhere inside the package.  File formats and
the text files written by the command line use 1-based indices; the
conversion happens only in the readers and writers of this module (and the
small ``*_one_based`` helpers on :class:`NodePermutation`).
"""
from __future__ import annotations

import io
import re
import shlex
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph


class ParseError(ValueError):
    """Malformed graph file.  ``lineno`` is 1-based, or None."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DuplicateEdgeWarning(UserWarning):
    pass


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True).reshape(-1)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with positive edge weights.

    Edges are kept as an ordered coordinate list of the upper triangle
    (``rows[k] < cols[k]``, lexicographically sorted).  Self-loops found in
    input files are kept aside in ``loop_nodes``/``loop_weights`` and never
    enter the adjacency matrix; :func:`strip` discards them.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    labels: tuple[str, ...] | None = None
    loop_nodes: np.ndarray = field(default_factory=lambda: _frozen([], np.int64))
    loop_weights: np.ndarray = field(default_factory=lambda: _frozen([], float))

    def __post_init__(self):
        rows = _frozen(self.rows, np.int64)
        cols = _frozen(self.cols, np.int64)
        weights = _frozen(self.weights, float)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "loop_nodes", _frozen(self.loop_nodes, np.int64))
        object.__setattr__(self, "loop_weights", _frozen(self.loop_weights, float))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.n:
                raise ValueError("labels must have one entry per node")
        if not (rows.shape == cols.shape == weights.shape):
            raise ValueError("rows, cols and weights must have equal length")
        if rows.size:
            if rows.min() < 0 or cols.max() >= self.n:
                raise ValueError("node index out of range")
            if np.any(rows >= cols):
                raise ValueError("edges must be stored as upper-triangle pairs")
            if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
                raise ValueError("edge weights must be finite and positive")
            key = rows * self.n + cols
            if np.any(np.diff(key) <= 0):
                raise ValueError("edges must be sorted and unique")
        if self.loop_nodes.shape != self.loop_weights.shape:
            raise ValueError("loop_nodes and loop_weights must have equal length")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n, i, j, w=None, *, labels=None, combine="last"):
        """Build a graph from (possibly unordered, repeated) 0-based pairs.

        ``combine`` decides how repeated pairs are merged: ``"last"`` keeps
        the weight of the last occurrence, ``"max"`` the largest weight.
        A :class:`DuplicateEdgeWarning` reports how many were merged.
        """
        i = np.asarray(i, dtype=np.int64).reshape(-1)
        j = np.asarray(j, dtype=np.int64).reshape(-1)
        w = np.ones(i.size) if w is None else np.asarray(w, dtype=float).reshape(-1)
        if not (i.size == j.size == w.size):
            raise ValueError("i, j and w must have equal length")
        if i.size and (min(i.min(), j.min()) < 0 or max(i.max(), j.max()) >= n):
            raise ValueError("node index out of range")
        loop = i == j
        loop_nodes, loop_weights = _merge_loops(i[loop], w[loop], combine)
        i, j, w = i[~loop], j[~loop], w[~loop]
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        rows, cols, weights, ndup = _merge_pairs(n, lo, hi, w, combine)
        if ndup:
            warnings.warn(f"{ndup} duplicate edge entries merged ({combine})",
                          DuplicateEdgeWarning, stacklevel=2)
        return cls(n, rows, cols, weights, labels, loop_nodes, loop_weights)

    @classmethod
    def from_dense(cls, a, *, tol=0.0, labels=None):
        """Graph from a dense symmetric matrix; entries ``<= tol`` are dropped."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0))):
            raise ValueError("adjacency matrix must be symmetric")
        if np.any(a < -tol):
            raise ValueError("negative weights are not supported")
        r, c = np.nonzero(np.triu(a, 1) > tol)
        d = np.nonzero(np.diag(a) > tol)[0]
        return cls(a.shape[0], r, c, a[r, c], labels, d, np.diag(a)[d])

    @classmethod
    def from_sparse(cls, m, **kw):
        """Graph from a symmetric sparse matrix (upper triangle is read)."""
        m = sp.coo_matrix(sp.triu(m))
        return cls.from_edges(m.shape[0], m.row, m.col, m.data, **kw)

    # -- views --------------------------------------------------------------

    @property
    def m(self) -> int:
        """Number of undirected edges (self-loops excluded)."""
        return int(self.rows.size)

    @property
    def weighted(self) -> bool:
        return bool(np.any(self.weights != 1.0) or np.any(self.loop_weights != 1.0))

    @property
    def self_loop_count(self) -> int:
        return int(self.loop_nodes.size)

    def to_sparse(self) -> sp.csr_matrix:
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        w = np.concatenate([self.weights, self.weights])
        a = sp.csr_matrix((w, (r, c)), shape=(self.n, self.n))
        a.sort_indices()
        return a

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.rows, self.cols] = self.weights
        a[self.cols, self.rows] = self.weights
        return a

    def degrees(self) -> np.ndarray:
        """Number of neighbours of each node."""
        return np.bincount(np.concatenate([self.rows, self.cols]), minlength=self.n)

    def edges(self):
        """Iterate ``(i, j, w)`` with 0-based ``i < j``."""
        return zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.labels == other.labels
                and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.loop_nodes, other.loop_nodes)
                and np.array_equal(self.loop_weights, other.loop_weights))

    __hash__ = None

    def __repr__(self):
        kind = "weighted" if self.weighted else "unweighted"
        return f"Graph(n={self.n}, m={self.m}, {kind}, loops={self.self_loop_count})"


def _merge_pairs(n, lo, hi, w, combine):
    if lo.size == 0:
        return lo, hi, w, 0
    key = lo * n + hi
    # stable sort keeps file order among duplicates, so "last" is well defined
    order = np.argsort(key, kind="stable")
    key, w = key[order], w[order]
    last = np.r_[key[1:] != key[:-1], True]
    first = np.r_[True, key[1:] != key[:-1]]
    if combine == "last":
        out_w = w[last]
    elif combine == "max":
        out_w = np.maximum.reduceat(w, np.nonzero(first)[0])
    else:
        raise ValueError(f"unknown combine rule {combine!r}")
    ukey = key[last]
    return ukey // n, ukey % n, out_w, int(key.size - ukey.size)


def _merge_loops(nodes, w, combine):
    if nodes.size == 0:
        return nodes, w
    r, c, out_w, _ = _merge_pairs(int(nodes.max()) + 1, nodes, np.zeros_like(nodes), w, combine)
    return r, out_w


@dataclass(frozen=True, eq=False)
class NodePermutation:
    """Bijection on node indices; node ``i`` moves to position ``map[i]``."""

    map: np.ndarray

    def __post_init__(self):
        p = _frozen(self.map, np.int64)
        if not np.array_equal(np.sort(p), np.arange(p.size)):
            raise ValueError("not a permutation")
        object.__setattr__(self, "map", p)

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n))

    @classmethod
    def from_order(cls, order):
        """Permutation placing ``order[k]`` at position ``k``."""
        order = np.asarray(order, dtype=np.int64)
        p = np.empty_like(order)
        p[order] = np.arange(order.size)
        return cls(p)

    @classmethod
    def from_one_based(cls, values):
        return cls(np.asarray(values, dtype=np.int64) - 1)

    @property
    def order(self) -> np.ndarray:
        """Original node found at each new position (inverse map)."""
        o = np.empty_like(self.map)
        o[self.map] = np.arange(self.map.size)
        return o

    @property
    def n(self):
        return int(self.map.size)

    def inverse(self) -> NodePermutation:
        return NodePermutation(self.order)

    def compose(self, other: NodePermutation) -> NodePermutation:
        """Apply ``self`` first, then ``other``."""
        return NodePermutation(other.map[self.map])

    def to_one_based(self) -> np.ndarray:
        return self.map + 1

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, NodePermutation):
            return NotImplemented
        return np.array_equal(self.map, other.map)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Partition:
    """Two-set split of the nodes; ``labels[i]`` is 1 or 2, with n1 >= n2."""

    labels: np.ndarray

    def __post_init__(self):
        lab = _frozen(self.labels, np.int64)
        if lab.size and not np.all((lab == 1) | (lab == 2)):
            raise ValueError("partition labels must be 1 or 2")
        object.__setattr__(self, "labels", lab)
        if self.n1 < self.n2:
            raise ValueError("set 1 must not be smaller than set 2 (use from_labels)")

    @classmethod
    def from_labels(cls, labels) -> Partition:
        """Accept any 1/2 labelling, swapping the sets when set 1 is smaller."""
        lab = np.asarray(labels, dtype=np.int64)
        if np.count_nonzero(lab == 1) < np.count_nonzero(lab == 2):
            lab = 3 - lab
        return cls(lab)

    @classmethod
    def from_first(cls, n, members) -> Partition:
        lab = np.full(n, 2, dtype=np.int64)
        lab[np.asarray(members, dtype=np.int64)] = 1
        return cls.from_labels(lab)

    @property
    def n(self):
        return int(self.labels.size)

    @property
    def n1(self):
        return int(np.count_nonzero(self.labels == 1))

    @property
    def n2(self):
        return int(np.count_nonzero(self.labels == 2))

    @property
    def first(self) -> np.ndarray:
        return np.nonzero(self.labels == 1)[0]

    @property
    def second(self) -> np.ndarray:
        return np.nonzero(self.labels == 2)[0]

    def permuted(self, p: NodePermutation) -> Partition:
        lab = np.empty_like(self.labels)
        lab[p.map] = self.labels
        return Partition(lab)

    def restrict(self, nodes) -> Partition:
        return Partition.from_labels(self.labels[np.asarray(nodes, dtype=np.int64)])

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None


@dataclass(frozen=True)
class ComponentDecomposition:
    """Connected components, largest first; node lists ascending."""

    components: tuple[np.ndarray, ...]

    @property
    def sizes(self) -> list[int]:
        return [int(c.size) for c in self.components]

    @property
    def largest(self) -> np.ndarray:
        return self.components[0]

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)


# -- readers --------------------------------------------------------------

_PAJEK_SECTION = re.compile(r"^\*(\w+)", re.IGNORECASE)


def _tokens(line: str, lineno: int) -> list[str]:
    try:
        return shlex.split(line, comments=False, posix=True)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def _weight(tok: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(f"bad weight {tok!r}", lineno) from None
    if not np.isfinite(w) or w <= 0:
        raise ParseError(f"nonpositive weight {tok!r}", lineno)
    return w


def _index(tok: str, n: int | None, lineno: int) -> int:
    try:
        k = int(tok)
    except ValueError:
        raise ParseError(f"bad node index {tok!r}", lineno) from None
    if k < 1 or (n is not None and k > n):
        raise ParseError(f"node index {k} out of range", lineno)
    return k - 1


def load_pajek(text: str | io.TextIOBase) -> Graph:
    """Parse the Pajek ``.net`` subset: ``*Vertices``, ``*Edges``, ``*Arcs``.

    ``*Edgeslist``/``*Arcslist`` sections (one source node followed by its
    neighbours) are accepted as well.  Arc pairs (i, j) and (j, i) are merged
    keeping the larger weight; repeated undirected lines keep the last one.
    """
    if not isinstance(text, str):
        text = text.read()
    n = None
    labels: list[str] = []
    section = None
    undirected: list[tuple[int, int, float]] = []
    arcs: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        head = _PAJEK_SECTION.match(line)
        if head:
            key = head.group(1).lower()
            if key == "vertices":
                parts = line.split()
                if len(parts) < 2:
                    raise ParseError("*Vertices needs a node count", lineno)
                try:
                    n = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
                if n < 0:
                    raise ParseError("negative node count", lineno)
                labels = [str(k + 1) for k in range(n)]
                section = "vertices"
            elif key in ("edges", "arcs", "edgeslist", "arcslist"):
                if n is None:
                    raise ParseError(f"*{head.group(1)} before *Vertices", lineno)
                section = key
            else:
                raise ParseError(f"unsupported section *{head.group(1)}", lineno)
            continue
        if section is None:
            raise ParseError("missing *Vertices header", lineno)
        tok = _tokens(line, lineno)
        if section == "vertices":
            k = _index(tok[0], n, lineno)
            if len(tok) > 1:
                labels[k] = tok[1]
        elif section in ("edges", "arcs"):
            if len(tok) < 2:
                raise ParseError("edge line needs two node indices", lineno)
            i, j = _index(tok[0], n, lineno), _index(tok[1], n, lineno)
            w = _weight(tok[2], lineno) if len(tok) > 2 else 1.0
            (undirected if section == "edges" else arcs).append((i, j, w))
        else:
            i = _index(tok[0], n, lineno)
            dest = undirected if section == "edgeslist" else arcs
            dest.extend((i, _index(t, n, lineno), 1.0) for t in tok[1:])
    if n is None:
        raise ParseError("missing *Vertices header")
    # arcs first so that explicit *Edges lines override them
    entries = _merge_arcs(n, arcs) + undirected
    i, j, w = (np.array(x) for x in zip(*entries)) if entries else ([], [], [])
    has_labels = any(lab != str(k + 1) for k, lab in enumerate(labels))
    return Graph.from_edges(n, i, j, w, labels=labels if has_labels else None)


def _merge_arcs(n, arcs):
    """Symmetrize directed entries, keeping the larger of (i, j) and (j, i)."""
    if not arcs:
        return []
    i, j, w = (np.array(x) for x in zip(*arcs))
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    key = lo * n + hi
    order = np.argsort(key, kind="stable")
    key, w = key[order], w[order]
    start = np.nonzero(np.r_[True, key[1:] != key[:-1]])[0]
    wmax = np.maximum.reduceat(w, start)
    wmin = np.minimum.reduceat(w, start)
    if np.any(wmax != wmin):
        warnings.warn(f"{int(np.count_nonzero(wmax != wmin))} arc pairs with unequal "
                      "weights; keeping the maximum", DuplicateEdgeWarning, stacklevel=3)
    ukey = key[start]
    return list(zip((ukey // n).tolist(), (ukey % n).tolist(), wmax.tolist()))


def load_matrix_market(text: str | io.TextIOBase) -> Graph:
    """Parse ``coordinate real symmetric`` or ``coordinate pattern symmetric``."""
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1)
    banner = lines[0].split()
    if len(banner) != 5 or banner[0].lower() != "%%matrixmarket" or banner[1].lower() != "matrix":
        raise ParseError("missing %%MatrixMarket matrix header", 1)
    layout, field_, symmetry = (b.lower() for b in banner[2:])
    if layout != "coordinate" or field_ not in ("real", "pattern") or symmetry != "symmetric":
        raise ParseError(f"unsupported Matrix Market type {' '.join(banner[2:])!r}", 1)
    size = None
    i_list, j_list, w_list = [], [], []
    for lineno, raw in enumerate(lines[1:], 2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tok = line.split()
        if size is None:
            if len(tok) != 3:
                raise ParseError("size line must be 'rows cols entries'", lineno)
            try:
                nr, nc, nnz = (int(t) for t in tok)
            except ValueError:
                raise ParseError("bad size line", lineno) from None
            if nr != nc:
                raise ParseError("symmetric matrix must be square", lineno)
            size = (nr, nnz)
            continue
        need = 2 if field_ == "pattern" else 3
        if len(tok) < need:
            raise ParseError(f"entry needs {need} fields", lineno)
        i_list.append(_index(tok[0], size[0], lineno))
        j_list.append(_index(tok[1], size[0], lineno))
        w_list.append(_weight(tok[2], lineno) if field_ == "real" else 1.0)
    if size is None:
        raise ParseError("missing size line")
    if len(i_list) != size[1]:
        raise ParseError(f"expected {size[1]} entries, found {len(i_list)}")
    return Graph.from_edges(size[0], i_list, j_list, w_list)


def load_edge_list(text: str | io.TextIOBase, n: int | None = None) -> Graph:
    """Parse ``i<TAB>j[<TAB>w]`` lines (any whitespace accepted).

    Lines starting with ``#`` are comments, except ``# nodes N`` which fixes
    the node count (written by :func:`save_graph` so isolated nodes survive).
    """
    if not isinstance(text, str):
        text = text.read()
    i_list, j_list, w_list = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hdr = re.match(r"#\s*nodes\s+(\d+)\s*$", line)
            if hdr:
                n = int(hdr.group(1))
            continue
        tok = line.split()
        if len(tok) < 2:
            raise ParseError("edge line needs two node indices", lineno)
        i_list.append(_index(tok[0], n, lineno))
        j_list.append(_index(tok[1], n, lineno))
        w_list.append(_weight(tok[2], lineno) if len(tok) > 2 else 1.0)
    if n is None:
        n = max(max(i_list, default=-1), max(j_list, default=-1)) + 1
    elif i_list and max(max(i_list), max(j_list)) >= n:
        raise ParseError("node index exceeds declared node count")
    return Graph.from_edges(n, i_list, j_list, w_list)


FORMATS = ("pajek", "mtx", "tsv")
_EXTENSIONS = {".net": "pajek", ".paj": "pajek", ".mtx": "mtx", ".mm": "mtx",
               ".tsv": "tsv", ".txt": "tsv", ".edges": "tsv"}
_FORMAT_ALIASES = {"pajek": "pajek", "mtx": "mtx", "matrix-market": "mtx",
                   "matrix-market-symmetric-coordinate": "mtx", "tsv": "tsv",
                   "tsv-edge-list": "tsv", "edge-list": "tsv"}


def canonical_format(fmt: str) -> str:
    try:
        return _FORMAT_ALIASES[fmt.lower()]
    except KeyError:
        raise ValueError(f"unknown graph format {fmt!r}; choose from {', '.join(FORMATS)}") from None


def guess_format(path) -> str:
    ext = Path(path).suffix.lower()
    if ext not in _EXTENSIONS:
        raise ValueError(f"cannot infer graph format from {str(path)!r}; pass a format")
    return _EXTENSIONS[ext]


def loads(text: str, fmt: str) -> Graph:
    fmt = canonical_format(fmt)
    if fmt == "pajek":
        return load_pajek(text)
    if fmt == "mtx":
        return load_matrix_market(text)
    return load_edge_list(text)


def load_graph(path, fmt: str | None = None) -> Graph:
    fmt = canonical_format(fmt) if fmt else guess_format(path)
    with open(path, encoding="utf-8", errors="replace") as fh:
        return loads(fh.read(), fmt)


def _fmt_w(w: float) -> str:
    return repr(float(w))


def save_graph(g: Graph, fmt: str) -> str:
    """Serialize ``g``; loading the result gives back an equal graph."""
    fmt = canonical_format(fmt)
    weighted = g.weighted
    out = io.StringIO()
    loops = list(zip(g.loop_nodes.tolist(), g.loop_weights.tolist()))
    if fmt == "pajek":
        out.write(f"*Vertices {g.n}\n")
        if g.labels is not None:
            for k, lab in enumerate(g.labels, 1):
                out.write(f'{k} "{lab}"\n')
        out.write("*Edges\n")
        for i, j, w in list(g.edges()) + [(v, v, w) for v, w in loops]:
            out.write(f"{i + 1} {j + 1} {_fmt_w(w)}\n" if weighted else f"{i + 1} {j + 1}\n")
    elif fmt == "mtx":
        kind = "real" if weighted else "pattern"
        out.write(f"%%MatrixMarket matrix coordinate {kind} symmetric\n")
        out.write(f"{g.n} {g.n} {g.m + len(loops)}\n")
        # lower triangle, as the format recommends
        for i, j, w in list(g.edges()) + [(v, v, w) for v, w in loops]:
            out.write(f"{j + 1} {i + 1} {_fmt_w(w)}\n" if weighted else f"{j + 1} {i + 1}\n")
    else:
        out.write(f"# nodes {g.n}\n")
        for i, j, w in list(g.edges()) + [(v, v, w) for v, w in loops]:
            out.write(f"{i + 1}\t{j + 1}\t{_fmt_w(w)}\n" if weighted else f"{i + 1}\t{j + 1}\n")
    return out.getvalue()


def write_graph(g: Graph, path, fmt: str | None = None) -> None:
    fmt = canonical_format(fmt) if fmt else guess_format(path)
    Path(path).write_text(save_graph(g, fmt), encoding="utf-8")


# -- structural operations ------------------------------------------------

def strip(g: Graph) -> tuple[Graph, np.ndarray, int]:
    """Drop self-loops, then nodes without neighbours.

    Returns the cleaned graph, the removed (0-based, original) node indices
    and the number of self-loops discarded.
    """
    keep = np.nonzero(g.degrees() > 0)[0]
    removed = np.setdiff1d(np.arange(g.n), keep)
    h = extract_subgraph(g, keep)
    h = Graph(h.n, h.rows, h.cols, h.weights, h.labels)
    return h, removed, g.self_loop_count


def connected_components(g: Graph) -> ComponentDecomposition:
    ncomp, lab = csgraph.connected_components(g.to_sparse(), directed=False)
    comps = [np.nonzero(lab == c)[0] for c in range(ncomp)]
    comps.sort(key=lambda c: (-c.size, c[0] if c.size else 0))
    return ComponentDecomposition(tuple(comps))


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or csgraph.connected_components(g.to_sparse(), directed=False)[0] == 1


def permute(g: Graph, p: NodePermutation) -> Graph:
    """Relabel node ``i`` as ``p.map[i]``."""
    if p.n != g.n:
        raise ValueError(f"permutation of size {p.n} applied to graph with {g.n} nodes")
    labels = None if g.labels is None else tuple(np.asarray(g.labels, dtype=object)[p.order])
    loops_order = np.argsort(p.map[g.loop_nodes], kind="stable")
    h = Graph.from_edges(g.n, p.map[g.rows], p.map[g.cols], g.weights, labels=labels)
    return Graph(h.n, h.rows, h.cols, h.weights, labels,
                 p.map[g.loop_nodes][loops_order], g.loop_weights[loops_order])


def extract_subgraph(g: Graph, nodes: Sequence[int] | np.ndarray) -> Graph:
    """Induced subgraph; ``nodes[k]`` becomes node ``k``."""
    nodes = np.asarray(nodes, dtype=np.int64).reshape(-1)
    if nodes.size and (nodes.min() < 0 or nodes.max() >= g.n):
        raise ValueError("node index out of range")
    if np.unique(nodes).size != nodes.size:
        raise ValueError("subgraph nodes must be distinct")
    where = np.full(g.n, -1, dtype=np.int64)
    where[nodes] = np.arange(nodes.size)
    r, c = where[g.rows], where[g.cols]
    keep = (r >= 0) & (c >= 0)
    lr, lw = where[g.loop_nodes], g.loop_weights
    lkeep = lr >= 0
    labels = None if g.labels is None else tuple(g.labels[k] for k in nodes.tolist())
    h = Graph.from_edges(nodes.size, r[keep], c[keep], g.weights[keep], labels=labels)
    lo = np.argsort(lr[lkeep], kind="stable")
    return Graph(h.n, h.rows, h.cols, h.weights, labels, lr[lkeep][lo], lw[lkeep][lo])


def frustration(g: Graph, part: Partition | np.ndarray) -> float:
    """Total weight of edges whose endpoints lie in the same set."""
    labels = part.labels if isinstance(part, Partition) else np.asarray(part)
    if labels.size != g.n:
        raise ValueError(f"partition covers {labels.size} nodes, graph has {g.n}")
    same = labels[g.rows] == labels[g.cols]
    return float(g.weights[same].sum())


def block_weights(g: Graph, nodes: Iterable[int]) -> tuple[int, float]:
    """Edge count and total weight inside the node set ``nodes``."""
    mask = np.zeros(g.n, dtype=bool)
    mask[np.asarray(list(nodes), dtype=np.int64)] = True
    inside = mask[g.rows] & mask[g.cols]
    return int(inside.sum()), float(g.weights[inside].sum())
