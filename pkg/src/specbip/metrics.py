"""Bipartivity and recovery-quality indices."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, Partition
from .linalg import eigvalsh

CSV_COLUMNS = ("n1", "n2", "xi", "eta", "seed", "method",
               "I_B", "E_B", "E_A", "E_N", "frustration", "time_s")
NONZERO_TOL = 1e-12


def _eigenvalues(x) -> np.ndarray:
    if isinstance(x, Graph):
        return eigvalsh(x.to_dense())
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x
    if x.ndim == 2 and x.shape[0] == x.shape[1]:
        return eigvalsh(x)
    raise ValueError("expected a Graph, a square matrix or a 1-D eigenvalue array")


def bipartivity_index(x) -> float:
    """``tr exp(-A) / tr exp(A)`` from the eigenvalues of ``A``.

    ``x`` is a :class:`Graph`, a symmetric matrix or its eigenvalues.  Both
    sums are scaled by ``exp(-max|lam|)`` so large spectra do not overflow.
    For a nonnegative matrix the ratio cannot exceed 1 (all odd traces are
    nonnegative), so anything above 1 is rounding error and is clipped.
    """
    lam = _eigenvalues(x)
    if lam.size == 0:
        raise ValueError("empty spectrum")
    shift = np.abs(lam).max()
    return float(min(np.exp(-lam - shift).sum() / np.exp(lam - shift).sum(), 1.0))


def bipartivity_defect(x) -> float:
    """``1 - b_s``; zero for bipartite graphs."""
    return 1.0 - bipartivity_index(x)


def _nnz(m) -> int:
    return int(np.count_nonzero(np.abs(m) > NONZERO_TOL))


def error_indices(a_true, a_b, truth: Partition) -> tuple[float, float]:
    """Within-block error density and cross-block error ratio.

    ``a_true`` is the unperturbed bipartite matrix (or :class:`Graph`) and
    ``a_b`` the approximation, both in the same node order; ``truth`` says
    which nodes form each block.  With ``E = a_true - a_b``::

        E_B = nnz(E11) / n1**2 + nnz(E22) / n2**2
        E_A = nnz(E12) / nnz(C)

    where ``C`` is the cross block of ``a_true``.
    """
    a_true = a_true.to_dense() if isinstance(a_true, Graph) else np.asarray(a_true, dtype=float)
    a_b = np.asarray(a_b, dtype=float)
    if a_true.shape != a_b.shape or a_true.shape != (truth.n, truth.n):
        raise ValueError(f"shape mismatch: {a_true.shape}, {a_b.shape}, partition of {truth.n}")
    i1, i2 = truth.first, truth.second
    e = a_true - a_b
    c = _nnz(a_true[np.ix_(i1, i2)])
    if c == 0:
        raise ValueError("ground-truth cross block is empty")
    e_b = _nnz(e[np.ix_(i1, i1)]) / truth.n1 ** 2
    if truth.n2:
        e_b += _nnz(e[np.ix_(i2, i2)]) / truth.n2 ** 2
    return float(e_b), _nnz(e[np.ix_(i1, i2)]) / c


def node_error(true_part: Partition, got_part: Partition) -> tuple[float, int]:
    """Fraction and count of true set-1 nodes placed in set 2.

    The two ways of matching the labels of ``got_part`` to ``true_part`` are
    both tried and the smaller count is kept.
    """
    if true_part.n != got_part.n:
        raise ValueError("partitions have different sizes")
    first = true_part.labels == 1
    wrong = int(np.count_nonzero(got_part.labels[first] == 2))
    count = min(wrong, int(first.sum()) - wrong)
    return count / true_part.n1, count


def format_value(x) -> str:
    """CSV cell: integers verbatim, floats with 6 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.5e}"


@dataclass(frozen=True)
class QualityReport:
    i_b: float
    e_b: float
    e_a: float
    e_n: float
    e_n_count: int
    frustration: float
    b_s: float

    def values(self, **context) -> dict:
        """Full CSV record; missing context columns become ``nan``."""
        rec = {k: context.get(k, float("nan")) for k in CSV_COLUMNS}
        rec.update(I_B=self.i_b, E_B=self.e_b, E_A=self.e_a, E_N=self.e_n,
                   frustration=self.frustration)
        if "time_s" in context:
            rec["time_s"] = context["time_s"]
        return rec

    def csv_row(self, **context) -> str:
        rec = self.values(**context)
        return ",".join(format_value(rec[k]) for k in CSV_COLUMNS)


def csv_header(columns=CSV_COLUMNS) -> str:
    return ",".join(columns)


def quality_report(a_b, *, a_true=None, truth: Partition | None = None,
                   got: Partition | None = None, frustration: float = float("nan"),
                   with_cross: bool = True) -> QualityReport:
    """Collect all indices that the supplied inputs allow; the rest are ``nan``.

    ``with_cross=False`` leaves ``E_A`` undefined (used when ``a_b`` is not a
    reconstruction but the input matrix itself).
    """
    b_s = bipartivity_index(a_b)
    e_b = e_a = e_n = float("nan")
    count = -1
    if a_true is not None and truth is not None:
        e_b, e_a = error_indices(a_true, a_b, truth)
        if not with_cross:
            e_a = float("nan")
    if truth is not None and got is not None:
        e_n, count = node_error(truth, got)
    return QualityReport(1.0 - b_s, e_b, e_a, e_n, count, frustration, b_s)
