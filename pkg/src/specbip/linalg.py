"""Dense symmetric eigendecomposition, SVD and the Procrustes kernel."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class ConvergenceError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class SpectralFactorization:
    """``a = vectors @ diag(values) @ vectors.T``, values nonincreasing."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T

    @property
    def n(self):
        return self.values.size


@dataclass(frozen=True)
class SvdFactorization:
    """``m = left @ diag_rect(sigma) @ right.T`` with square orthogonal factors."""

    left: np.ndarray
    sigma: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.sigma.size
        return (self.left[:, :k] * self.sigma) @ self.right[:, :k].T


def normalize_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    Ties go to the lowest row index (``argmax`` returns the first maximum).
    """
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _check_finite(a, what):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} has non-finite entries")


def eigh(a, *, driver: str = "ev") -> SpectralFactorization:
    """Eigendecomposition of a dense symmetric matrix.

    The default LAPACK driver (``?syev``) reduces to tridiagonal form with
    Householder reflections and then runs implicitly shifted QL/QR.  The
    input is symmetrized as ``(a + a.T) / 2``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eigh needs a square matrix")
    _check_finite(a, "matrix")
    a = (a + a.T) / 2
    if a.shape[0] == 0:
        return SpectralFactorization(np.zeros(0), np.zeros((0, 0)))
    try:
        values, vectors = scipy.linalg.eigh(a, driver=driver, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver did not converge: {exc}") from exc
    return SpectralFactorization(values[::-1].copy(), normalize_signs(vectors[:, ::-1]))


def eigvalsh(a, *, driver: str = "ev") -> np.ndarray:
    """Eigenvalues only, nonincreasing."""
    a = np.asarray(a, dtype=float)
    _check_finite(a, "matrix")
    a = (a + a.T) / 2
    if a.shape[0] == 0:
        return np.zeros(0)
    try:
        values = scipy.linalg.eigh(a, eigvals_only=True, driver=driver, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver did not converge: {exc}") from exc
    return values[::-1].copy()


def svd(m) -> SvdFactorization:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError("svd needs a matrix")
    _check_finite(m, "matrix")
    try:
        u, s, vt = scipy.linalg.svd(m, full_matrices=True, lapack_driver="gesvd",
                                    check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    return SvdFactorization(u, s, vt.T)


def closest_orthogonal(m, *, return_defect: bool = False):
    """Nearest matrix with orthonormal columns in the Frobenius norm.

    With ``m = P diag(s) Q^T`` (thin SVD) the minimizer is ``P Q^T``.  For a
    tall ``m`` the result has orthonormal columns.  If ``return_defect`` is
    set, ``||Q diag(s) Q^T - I||_F`` is returned as well: the symmetric polar
    factor's distance from the identity, which is zero iff ``m`` already has
    orthonormal columns.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError("closest_orthogonal needs a matrix")
    _check_finite(m, "matrix")
    if m.size == 0:
        out = np.zeros(m.shape)
        return (out, 0.0) if return_defect else out
    try:
        p, s, qt = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd",
                                    check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    out = p @ qt
    if not return_defect:
        return out
    sym = (qt.T * s) @ qt
    return out, float(np.linalg.norm(sym - np.eye(sym.shape[0])))


def flip_product(m) -> np.ndarray:
    """``m @ Z`` with Z the anti-diagonal flip: columns in reverse order."""
    return np.asarray(m)[:, ::-1]
