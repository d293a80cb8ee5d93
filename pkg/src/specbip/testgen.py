"""Seeded random test problems: bipartite block matrices, noise, scrambling.

All randomness comes from numpy's PCG64 generator seeded through
``SeedSequence``, which is stable across platforms and numpy releases.  A
:class:`TestSpec` seed spawns three child streams, used for the cross block,
the within-block noise and the scrambling permutation respectively.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .graph import Graph, NodePermutation, Partition, permute


@dataclass(frozen=True)
class TestSpec:
    """Parameters of one random experiment.

    ``xi`` is the density of the cross block ``C`` and ``eta`` that of the
    within-block noise.  Weighted graphs draw weights uniformly from (0, 1].
    """

    __test__ = False  # keep pytest from collecting this class

    n1: int
    n2: int
    xi: float
    eta: float = 0.0
    seed: int = 0
    weighted: bool = False

    def __post_init__(self):
        if not self.n1 >= self.n2 >= 1:
            raise ValueError(f"need n1 >= n2 >= 1, got ({self.n1}, {self.n2})")
        if not 0 < self.xi <= 1:
            raise ValueError(f"xi must lie in (0, 1], got {self.xi}")
        if not 0 <= self.eta < 1:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def n(self):
        return self.n1 + self.n2

    def to_text(self) -> str:
        """Flat ``key=value`` lines, one per field."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(f"{f.name}={str(v).lower() if isinstance(v, bool) else repr(v)}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> TestSpec:
        kv = parse_key_values(text)
        unknown = set(kv) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown keys: {sorted(unknown)}")
        conv = {"n1": int, "n2": int, "xi": float, "eta": float, "seed": int,
                "weighted": parse_bool}
        return cls(**{k: conv[k](v) for k, v in kv.items()})

    def streams(self):
        """Generators for the cross block, the noise and the scrambling."""
        return [np.random.Generator(np.random.PCG64(s))
                for s in np.random.SeedSequence(self.seed).spawn(3)]


def parse_bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def parse_key_values(text: str) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are ignored."""
    kv = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key = key.strip()
        if key in kv:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        kv[key] = value.strip()
    return kv


def _weights(rng, k, weighted):
    # 1 - U[0, 1) is uniform on (0, 1]
    return 1.0 - rng.random(k) if weighted else np.ones(k)


def random_cross_block(n1, n2, xi, rng, weighted=False) -> np.ndarray:
    """Random ``n1 x n2`` block with density ``xi`` and no empty row or column.

    An empty row gets one entry in a uniformly chosen column; afterwards an
    empty column gets one entry in a uniformly chosen row.
    """
    mask = rng.random((n1, n2)) < xi
    for i in np.nonzero(~mask.any(axis=1))[0]:
        mask[i, rng.integers(n2)] = True
    for j in np.nonzero(~mask.any(axis=0))[0]:
        mask[rng.integers(n1), j] = True
    c = np.zeros((n1, n2))
    c[mask] = _weights(rng, int(mask.sum()), weighted)
    return c


def random_bipartite(spec: TestSpec) -> Graph:
    """Bipartite graph ``[[0, C], [C^T, 0]]`` with nodes ``0..n1-1`` in set 1."""
    rng = spec.streams()[0]
    c = random_cross_block(spec.n1, spec.n2, spec.xi, rng, spec.weighted)
    i, j = np.nonzero(c)
    return Graph.from_edges(spec.n, i, j + spec.n1, c[i, j])


def _upper_pairs(rng, lo, hi, eta):
    """Random pairs ``lo <= i < j < hi``, each present with probability ``eta``."""
    k = hi - lo
    if k < 2 or eta == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    i, j = np.triu_indices(k, 1)
    keep = rng.random(i.size) < eta
    return i[keep] + lo, j[keep] + lo


def perturb(g: Graph, n1: int, eta: float, seed=None, *, rng=None,
            weighted: bool | None = None) -> Graph:
    """Add random edges inside the blocks ``0..n1-1`` and ``n1..n-1``.

    Every within-block pair not already joined gets an edge with probability
    ``eta``; cross-block edges are left alone.  Weights follow ``weighted``
    (by default: whether ``g`` is weighted).
    """
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    if not 0 <= n1 <= g.n:
        raise ValueError("n1 out of range")
    if rng is None:
        rng = np.random.default_rng(seed)
    weighted = g.weighted if weighted is None else weighted
    i1, j1 = _upper_pairs(rng, 0, n1, eta)
    i2, j2 = _upper_pairs(rng, n1, g.n, eta)
    i, j = np.concatenate([i1, i2]), np.concatenate([j1, j2])
    w = _weights(rng, i.size, weighted)
    fresh = ~np.isin(i * g.n + j, g.rows * g.n + g.cols)
    rows = np.concatenate([g.rows, i[fresh]])
    cols = np.concatenate([g.cols, j[fresh]])
    ws = np.concatenate([g.weights, w[fresh]])
    return Graph.from_edges(g.n, rows, cols, ws, labels=g.labels)


def scramble(g: Graph, seed=None, *, rng=None) -> tuple[Graph, NodePermutation]:
    """Relabel the nodes by a uniformly random permutation."""
    if rng is None:
        rng = np.random.default_rng(seed)
    p = NodePermutation(rng.permutation(g.n))
    return permute(g, p), p


@dataclass(frozen=True)
class Experiment:
    """Everything one random trial needs.

    ``truth`` and ``perturbed`` use the block node order; ``scrambled`` and
    ``truth_scrambled`` use the scrambled order, in which ``partition`` gives
    the true sets.
    """

    spec: TestSpec
    truth: Graph
    perturbed: Graph
    scrambled: Graph
    truth_scrambled: Graph
    permutation: NodePermutation
    partition: Partition


def make_experiment(spec: TestSpec) -> Experiment:
    _, noise_rng, perm_rng = spec.streams()
    truth = random_bipartite(spec)
    noisy = perturb(truth, spec.n1, spec.eta, rng=noise_rng, weighted=spec.weighted)
    scrambled, p = scramble(noisy, rng=perm_rng)
    labels = np.r_[np.ones(spec.n1, np.int64), np.full(spec.n2, 2, np.int64)]
    return Experiment(spec, truth, noisy, scrambled, permute(truth, p), p,
                      Partition(labels).permuted(p))
