"""Spectral bipartization and large anti-community detection.

The pipeline for a connected graph with adjacency matrix ``A``:

1. ``A = W diag(lam) W^T`` with ``lam`` nonincreasing.
2. Estimate the set sizes ``(n1, n2)`` from the largest jump in the
   magnitude-sorted spectrum (skipped when the caller supplies them).
3. Split ``W = [W1 | W2 | W3]`` into ``n2``, ``n1 - n2`` and ``n2`` columns and
   sort the nodes so that set 1 comes first.
4. Replace the eigenvectors by the nearest ones having bipartite structure
   (three orthogonal Procrustes problems) and the eigenvalues by the nearest
   sequence of +/- pairs and zeros, then multiply the factors back together.
5. Round the off-diagonal block according to the requested mode.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .graph import (Graph, NodePermutation, Partition, block_weights,
                    connected_components, extract_subgraph, is_connected)
from .linalg import SpectralFactorization, closest_orthogonal, eigh, flip_product

MODES = ("signed", "nonnegative", "binary", "integer")
_SQRT2 = np.sqrt(2.0)


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class BipartizeOptions:
    """Tuning knobs.

    ``tie_tol`` marks rows of the null-space block whose 1-norm is below
    ``tie_tol * max`` as numerically zero; see :func:`separating_permutation`.
    ``mode="integer"`` (round to the nearest nonnegative integer, for weighted
    graphs) is experimental.
    """

    n1n2: tuple[int, int] | None = None
    gap_ratio: float = 100.0
    zero_tol: float = 1e-8
    mode: str = "binary"
    tie_tol: float = 1e-8
    driver: str = "ev"

    def __post_init__(self):
        if not self.gap_ratio > 1:
            raise ValueError("gap_ratio must exceed 1")
        if not self.zero_tol > 0:
            raise ValueError("zero_tol must be positive")
        if self.mode not in MODES:
            raise ValueError(f"unknown rounding mode {self.mode!r}; choose from {MODES}")
        if self.n1n2 is not None:
            n1, n2 = (int(x) for x in self.n1n2)
            if min(n1, n2) < 1:
                raise ValueError("supplied set sizes must be positive")
            object.__setattr__(self, "n1n2", (max(n1, n2), min(n1, n2)))


@dataclass(frozen=True)
class CardinalityEstimate:
    """Set sizes read off the spectrum.

    ``ratios[i]`` is ``|mu[i+1]| / |mu[i]|`` for the magnitudes ``mu`` sorted
    ascending (0-based, so the selected jump is ``ratios[k - 1]``).  ``k`` is
    the number of eigenvalues below the jump, i.e. the numerically zero ones;
    it is 0 when no jump qualified.
    """

    n1: int
    n2: int
    k: int
    ratios: np.ndarray
    gap_found: bool

    @property
    def n_zero(self) -> int:
        return self.k


@dataclass(frozen=True)
class Bipartization:
    """Result of :func:`bipartize`.

    ``a_b`` (rounded) and ``a_b_signed`` (before rounding) are in the
    original node order.  ``sigma`` moves set-1 nodes to the front.
    """

    sigma: NodePermutation
    partition: Partition
    beta: np.ndarray
    a_b: np.ndarray
    a_b_signed: np.ndarray
    mode: str
    procrustes_defect: dict
    estimate: CardinalityEstimate
    eigenvalues: np.ndarray
    block_residual: float
    notes: tuple[str, ...] = ()
    internal_edges: int | None = None
    internal_weight: float | None = None

    @property
    def n1(self) -> int:
        return self.partition.n1

    @property
    def n2(self) -> int:
        return self.partition.n2

    @property
    def members(self) -> np.ndarray:
        """Nodes of the first (larger) set, in separating order."""
        return self.sigma.order[: self.n1]

    def to_graph(self) -> Graph:
        if self.mode == "signed":
            raise ValueError("signed approximations may have negative weights")
        return Graph.from_dense(self.a_b)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def estimate_cardinalities(values, opts: BipartizeOptions | None = None) -> CardinalityEstimate:
    """Estimate ``(n1, n2)`` from the largest gap in the magnitude spectrum."""
    opts = opts or BipartizeOptions()
    mags = np.sort(np.abs(np.asarray(values, dtype=float)), kind="stable")
    n = mags.size
    if n < 2:
        raise ValueError("need at least two eigenvalues")
    lower, upper = mags[:-1], mags[1:]
    ratios = np.full(n - 1, np.nan)
    np.divide(upper, lower, out=ratios, where=lower > 0)
    ratios[(lower == 0) & (upper > 0)] = np.inf
    eligible = (upper > opts.zero_tol) & (ratios > opts.gap_ratio)
    if not eligible.any():
        n1 = _round_half_up(n / 2)
        return CardinalityEstimate(n1, n - n1, 0, ratios, False)
    cand = np.nonzero(eligible)[0]
    k = int(cand[np.argmax(ratios[cand])]) + 1
    n2 = _round_half_up((n - k) / 2)
    return CardinalityEstimate(n - n2, n2, k, ratios, True)


def pair_eigenvalues(alpha, n1: int, n2: int) -> np.ndarray:
    """Closest sequence of +/- pairs with at least ``n1 - n2`` zeros.

    ``alpha`` must be nonincreasing with ``n1 + n2`` entries and ``n1 >= n2``.
    Entry ``j < n2`` becomes ``(alpha[j] - alpha[-1 - j]) / 2``, the middle
    ``n1 - n2`` entries become zero and the tail mirrors the head.
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1 or alpha.size != n1 + n2:
        raise ValueError(f"expected {n1 + n2} eigenvalues, got shape {alpha.shape}")
    if n2 < 0 or n1 < n2:
        raise ValueError("need n1 >= n2 >= 0")
    if np.any(np.diff(alpha) > 0):
        raise ValueError("eigenvalues must be sorted in nonincreasing order")
    head = (alpha[:n2] - alpha[::-1][:n2]) / 2
    return np.concatenate([head, np.zeros(n1 - n2), -head[::-1]])


def _check_blocks(w, n1, n2):
    w = np.asarray(w, dtype=float)
    n = n1 + n2
    if w.shape != (n, n):
        raise ValueError(f"eigenvector matrix must be {n}x{n}, got {w.shape}")
    if n2 < 0 or n1 < n2:
        raise ValueError("need n1 >= n2 >= 0")
    return w


def separating_permutation(w, n1: int, n2: int, *, tie_tol: float = 1e-8) -> NodePermutation:
    """Node order placing the ``n1`` nodes of the first set in front.

    With ``n1 > n2`` the rows are sorted by decreasing 1-norm of the
    null-space block ``W2``; with ``n1 == n2`` by increasing 1-norm of
    ``W1 - W3 Z``.  Sorting is stable.

    Rows of ``W2`` below ``tie_tol`` times the largest row norm are
    numerically zero and their relative order is noise.  A first-set node
    can land there (for instance the only neighbour of a degree-one node),
    so those rows are ordered by their coupling to the confidently placed
    rows through ``W1 W1^T - W3 W3^T``.  That odd spectral function of the
    adjacency matrix vanishes between same-set nodes of a bipartite graph.
    """
    w = _check_blocks(w, n1, n2)
    n = n1 + n2
    if n1 > n2:
        norms = np.abs(w[:, n2:n1]).sum(axis=1)
        order = np.argsort(-norms, kind="stable")
        tied = norms <= tie_tol * norms.max()
        if n2 > 0 and tied.any() and not tied.all():
            sure = np.nonzero(~tied)[0]
            sure = sure[np.argsort(-norms[sure], kind="stable")]
            rest = np.nonzero(tied)[0]
            w1, w3 = w[:, :n2], w[:, n1:]
            coupling = w1[rest] @ w1[sure].T - w3[rest] @ w3[sure].T
            key = np.abs(coupling).sum(axis=1)
            order = np.concatenate([sure, rest[np.argsort(key, kind="stable")]])
    else:
        # Paired columns must share a sign convention.  Fix it at the row
        # whose smallest entry over the paired columns is largest.
        paired = np.abs(np.concatenate([w[:, :n2], w[:, n1:]], axis=1))
        ref = int(np.argmax(paired.min(axis=1))) if n else 0
        w = w * np.where(w[ref] < 0, -1.0, 1.0)
        norms = np.abs(w[:, :n2] - flip_product(w[:, n1:])).sum(axis=1)
        order = np.argsort(norms, kind="stable")
    return NodePermutation.from_order(order)


def approximate_eigenvectors(wp, n1: int, n2: int):
    """Nearest structured eigenvector blocks for a row-sorted ``W``.

    Returns ``(u1, u2, v, defects)`` with ``u1.T @ u1 = v.T @ v = I/2`` and
    orthonormal ``u2``.  Each eigenvector's sign is arbitrary, so the partner
    of column ``j`` (column ``n - 1 - j``) is first flipped when that brings
    the pair closer to the structured form.  ``defects`` holds, per block,
    the distance of the symmetric polar factor from the identity.
    """
    wp = _check_blocks(wp, n1, n2)
    w11, w21 = wp[:n1, :n2], wp[n1:, :n2]
    w12 = wp[:n1, n2:n1]
    w13z, w23z = flip_product(wp[:n1, n1:]), flip_product(wp[n1:, n1:])
    score = np.sum(w11 * w13z, axis=0) - np.sum(w21 * w23z, axis=0)
    flip = np.where(score < 0, -1.0, 1.0)
    w13z, w23z = w13z * flip, w23z * flip
    x1, d1 = closest_orthogonal((w11 + w13z) / _SQRT2, return_defect=True)
    y, dv = closest_orthogonal((w21 - w23z) / _SQRT2, return_defect=True)
    u2, d2 = closest_orthogonal(w12, return_defect=True)
    defects = {"u1": d1, "v": dv, "u2": d2}
    return x1 / _SQRT2, u2, y / _SQRT2, defects


def reconstruct(u1, u2, v, beta, *, return_residual: bool = False):
    """Multiply the structured factors back into a bipartite matrix.

    The result is ``W_B diag(beta) W_B^T`` with
    ``W_B = [[u1, u2, u1 Z], [v, 0, -v Z]]``, in separating order.  Its
    diagonal blocks vanish in exact arithmetic and are set to zero here; the
    largest magnitude removed is returned when ``return_residual`` is set.
    """
    u1, v = np.atleast_2d(u1), np.atleast_2d(v)
    n1, n2 = u1.shape[0], v.shape[0]
    u2 = np.asarray(u2, dtype=float).reshape(n1, -1)
    if u1.shape[1] != n2 or v.shape[1] != n2 or u2.shape[1] != n1 - n2:
        raise ValueError("block shapes do not match (n1, n2)")
    beta = np.asarray(beta, dtype=float)
    if beta.size != n1 + n2:
        raise ValueError("beta must have n1 + n2 entries")
    wb = np.block([[u1, u2, flip_product(u1)],
                   [v, np.zeros((n2, n1 - n2)), -flip_product(v)]])
    a = (wb * beta) @ wb.T
    a = (a + a.T) / 2
    residual = max(np.abs(a[:n1, :n1]).max(initial=0.0), np.abs(a[n1:, n1:]).max(initial=0.0))
    a[:n1, :n1] = 0.0
    a[n1:, n1:] = 0.0
    return (a, float(residual)) if return_residual else a


def round_adjacency(a_b, mode: str = "binary") -> np.ndarray:
    """Turn the real bipartite approximation into an admissible adjacency matrix.

    The diagonal blocks are zero, so the rules act on the off-diagonal block
    only: ``signed`` keeps it, ``nonnegative`` clips negative entries,
    ``binary`` picks the nearest of {0, 1}, ``integer`` the nearest
    nonnegative integer.
    """
    a_b = np.asarray(a_b, dtype=float)
    if mode == "signed":
        return a_b.copy()
    if mode == "nonnegative":
        return np.maximum(a_b, 0.0)
    if mode == "binary":
        return (a_b >= 0.5).astype(float)
    if mode == "integer":
        return np.maximum(np.floor(a_b + 0.5), 0.0)
    raise ValueError(f"unknown rounding mode {mode!r}; choose from {MODES}")


def bipartize(g: Graph, opts: BipartizeOptions | None = None, *,
              factorization: SpectralFactorization | None = None) -> Bipartization:
    """Approximate a connected graph by a bipartite one.

    ``factorization`` lets callers reuse an eigendecomposition of
    ``g.to_dense()`` (e.g. to run both the estimated and the supplied-size
    variants on one matrix).
    """
    opts = opts or BipartizeOptions()
    n = g.n
    if n < 2:
        raise ValueError("bipartization needs at least two nodes")
    if not is_connected(g):
        raise DisconnectedGraphError(
            "graph is disconnected; process its connected_components() one at a "
            "time (or use bipartize_components / --component)")
    fact = factorization if factorization is not None else eigh(g.to_dense(), driver=opts.driver)
    if fact.n != n:
        raise ValueError("factorization does not match the graph size")
    est = estimate_cardinalities(fact.values, opts)
    notes = []
    if opts.n1n2 is not None:
        n1, n2 = opts.n1n2
        if n1 + n2 != n:
            raise ValueError(f"supplied sizes {n1}+{n2} do not add up to {n}")
        if (n1, n2) != (est.n1, est.n2):
            notes.append(f"supplied sizes ({n1}, {n2}) differ from spectral estimate "
                         f"({est.n1}, {est.n2}) with {est.k} near-zero eigenvalues")
    else:
        n1, n2 = est.n1, est.n2

    sigma = separating_permutation(fact.vectors, n1, n2, tie_tol=opts.tie_tol)
    wp = fact.vectors[sigma.order]
    u1, u2, v, defects = approximate_eigenvectors(wp, n1, n2)
    beta = pair_eigenvalues(fact.values, n1, n2)
    sorted_ab, residual = reconstruct(u1, u2, v, beta, return_residual=True)
    if residual > 1e-12 * max(np.abs(beta).max(initial=0.0), 1.0):
        notes.append(f"diagonal block residual {residual:.3e} cleared")
    back = np.ix_(sigma.map, sigma.map)
    a_signed = sorted_ab[back]
    labels = np.full(n, 2, dtype=np.int64)
    labels[sigma.order[:n1]] = 1
    return Bipartization(
        sigma=sigma, partition=Partition(labels), beta=beta,
        a_b=round_adjacency(a_signed, opts.mode), a_b_signed=a_signed, mode=opts.mode,
        procrustes_defect=defects, estimate=est, eigenvalues=fact.values,
        block_residual=residual, notes=tuple(notes))


def detect_anticommunity(g: Graph, opts: BipartizeOptions | None = None, *,
                         factorization: SpectralFactorization | None = None) -> Bipartization:
    """Run :func:`bipartize` and read the first set as an anti-community.

    ``internal_edges``/``internal_weight`` count the edges of ``g`` joining
    two members of that set.
    """
    b = bipartize(g, opts, factorization=factorization)
    count, weight = block_weights(g, b.partition.first)
    return dataclasses.replace(b, internal_edges=count, internal_weight=weight)


@dataclass
class ComponentResults:
    """Per-component bipartizations of a possibly disconnected graph."""

    n: int
    results: list = field(default_factory=list)   # (nodes, Bipartization)
    skipped: list = field(default_factory=list)   # node arrays below min_size

    def labels(self) -> np.ndarray:
        """Set label per node; 0 for nodes of skipped components."""
        lab = np.zeros(self.n, dtype=np.int64)
        for nodes, b in self.results:
            lab[nodes] = b.partition.labels
        return lab

    def a_b(self, signed: bool = False) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for nodes, b in self.results:
            a[np.ix_(nodes, nodes)] = b.a_b_signed if signed else b.a_b
        return a


def bipartize_components(g: Graph, opts: BipartizeOptions | None = None, *,
                         min_size: int = 2, anticommunity: bool = False) -> ComponentResults:
    """Bipartize every connected component with at least ``min_size`` nodes."""
    opts = opts or BipartizeOptions()
    if opts.n1n2 is not None:
        raise ValueError("set sizes cannot be supplied when splitting into components")
    run = detect_anticommunity if anticommunity else bipartize
    out = ComponentResults(g.n)
    for nodes in connected_components(g):
        if nodes.size < max(min_size, 2):
            out.skipped.append(nodes)
            continue
        out.results.append((nodes, run(extract_subgraph(g, nodes), opts)))
    return out
