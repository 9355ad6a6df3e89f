"""Dense complex linear algebra: SVD, numerical rank and Moore-Penrose inverses.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; real input is
promoted on entry. Rank decisions use one convention everywhere: a singular
value counts iff it exceeds ``max(rows, cols) * eps * sigma_1``, unless the
caller passes an absolute threshold.
"""

from typing import NamedTuple, Optional

import numpy as np

EPS = np.finfo(np.float64).eps

RankTolerance = Optional[float]


class SvdError(np.linalg.LinAlgError):
    """LAPACK failed to converge on a singular value decomposition."""


class SvdResult(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        return (self.left * self.singular_values) @ np.conj(self.right.T)


def as_cmatrix(m):
    """Validate and promote ``m`` to a finite 2-D complex array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def svd(m) -> SvdResult:
    """Thin SVD with ``right`` holding the right singular vectors as columns."""
    a = as_cmatrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SvdError(f"SVD did not converge for {a.shape} matrix") from exc
    return SvdResult(u, s, np.conj(vh.T))


def rank_threshold(singular_values, shape, tol: RankTolerance = None) -> float:
    if tol is not None:
        return float(tol)
    if len(singular_values) == 0:
        return 0.0
    return max(shape) * EPS * float(singular_values[0])


def numeric_rank(m, tol: RankTolerance = None) -> int:
    a = as_cmatrix(m)
    s = svd(a).singular_values
    return int(np.sum(s > rank_threshold(s, a.shape, tol)))


def rank_gap(m, tol: RankTolerance = None) -> float:
    """Ratio ``sigma_r / sigma_{r+1}`` at the numerical rank ``r``.

    ``inf`` when the trailing singular value is exactly zero or the matrix has
    full rank; large values mean the rank decision is robust.
    """
    a = as_cmatrix(m)
    s = svd(a).singular_values
    r = int(np.sum(s > rank_threshold(s, a.shape, tol)))
    if r == 0 or r == len(s) or s[r] == 0.0:
        return np.inf
    return float(s[r - 1] / s[r])


def pseudo_inverse(m, tol: RankTolerance = None):
    """Moore-Penrose generalized inverse via the SVD.

    Examples
    --------
    >>> pseudo_inverse([[2.0, 0.0], [0.0, 0.0]]).real
    array([[0.5, 0. ],
           [0. , 0. ]])
    """
    a = as_cmatrix(m)
    u, s, v = svd(a)
    keep = s > rank_threshold(s, a.shape, tol)
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (v * s_inv) @ np.conj(u.T)


def penrose_residuals(m, mdag):
    """Frobenius residuals of the four Penrose equations.

    Returns ``(|A X A - A|, |X A X - X|, |(A X)^H - A X|, |(X A)^H - X A|)``
    for ``A = m`` and ``X = mdag``.
    """
    a = as_cmatrix(m)
    x = np.asarray(mdag, dtype=np.complex128)
    if x.ndim != 2 or x.shape != (a.shape[1], a.shape[0]):
        raise ValueError(f"candidate inverse has shape {x.shape}, expected {(a.shape[1], a.shape[0])}")
    ax = a @ x
    xa = x @ a
    fro = np.linalg.norm
    return (
        float(fro(ax @ a - a)),
        float(fro(xa @ x - x)),
        float(fro(np.conj(ax.T) - ax)),
        float(fro(np.conj(xa.T) - xa)),
    )


def image_projector(m, tol: RankTolerance = None):
    """Orthogonal projector onto the column space, ``M M^+``."""
    a = as_cmatrix(m)
    return a @ pseudo_inverse(a, tol)


def kernel_complement_projector(m, tol: RankTolerance = None):
    """Orthogonal projector onto the orthogonal complement of the kernel, ``M^+ M``."""
    a = as_cmatrix(m)
    return pseudo_inverse(a, tol) @ a


def operator_norm(m) -> float:
    """Spectral norm (largest singular value)."""
    s = svd(m).singular_values
    return float(s[0])
