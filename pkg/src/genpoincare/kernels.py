"""Per-frequency batched kernels.

Every operation on the torus reduces to the same inner loop: one small dense
matrix per lattice frequency. These loops are compiled with numba when it is
available; a vectorized numpy path is kept alongside and can be forced with
``GENPOINCARE_DISABLE_NUMBA=1``.

Arrays handed to the public helpers are "stacked": any leading shape followed
by the matrix (or vector) axes. The helpers flatten the leading shape before
calling a kernel and restore it afterwards.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_EPS = np.finfo(np.float64).eps

NUMBA_DISABLED = os.environ.get("GENPOINCARE_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")
BACKEND = "numpy" if (NUMBA_DISABLED or numba is None) else "numba"


# --------------------------------------------------------------------------
# reference loops (compiled by numba, never run interpreted in production)
# --------------------------------------------------------------------------

def _pinv_loop(mats, abs_tol):
    k, rows, cols = mats.shape
    out = np.zeros((k, cols, rows), dtype=np.complex128)
    ranks = np.zeros(k, dtype=np.int64)
    big = max(rows, cols)
    for idx in range(k):
        a = np.ascontiguousarray(mats[idx])
        u, s, vh = np.linalg.svd(a, full_matrices=False)
        if abs_tol < 0.0:
            thresh = big * _EPS * s[0] if s.shape[0] > 0 else 0.0
        else:
            thresh = abs_tol
        r = 0
        for m in range(s.shape[0]):
            if s[m] > thresh:
                r += 1
        ranks[idx] = r
        for m in range(r):
            inv_s = 1.0 / s[m]
            for i in range(cols):
                vi = np.conj(vh[m, i]) * inv_s
                for j in range(rows):
                    out[idx, i, j] += vi * np.conj(u[j, m])
    return out, ranks


def _matvec_loop(mats, vecs):
    k, rows, cols = mats.shape
    out = np.zeros((k, rows), dtype=np.complex128)
    for idx in range(k):
        for i in range(rows):
            acc = 0j
            for j in range(cols):
                acc += mats[idx, i, j] * vecs[idx, j]
            out[idx, i] = acc
    return out


def _matmul_loop(a, b):
    k, rows, inner = a.shape
    cols = b.shape[2]
    out = np.zeros((k, rows, cols), dtype=np.complex128)
    for idx in range(k):
        for i in range(rows):
            for m in range(inner):
                aim = a[idx, i, m]
                if aim != 0:
                    for j in range(cols):
                        out[idx, i, j] += aim * b[idx, m, j]
    return out


def _norm_pow_sum_loop(values, p):
    # values: (points, fiber) real
    total = 0.0
    for idx in range(values.shape[0]):
        sq = 0.0
        for c in range(values.shape[1]):
            sq += values[idx, c] * values[idx, c]
        total += sq ** (0.5 * p)
    return total


if numba is not None:
    _pinv_numba = numba.njit(cache=True)(_pinv_loop)
    _matvec_numba = numba.njit(cache=True)(_matvec_loop)
    _matmul_numba = numba.njit(cache=True)(_matmul_loop)
    _norm_pow_sum_numba = numba.njit(cache=True)(_norm_pow_sum_loop)


# --------------------------------------------------------------------------
# vectorized numpy fallbacks
# --------------------------------------------------------------------------

def _pinv_numpy(mats, abs_tol):
    k, rows, cols = mats.shape
    u, s, vh = np.linalg.svd(mats, full_matrices=False)
    if abs_tol < 0.0:
        thresh = max(rows, cols) * _EPS * s[:, :1]
    else:
        thresh = np.full((k, 1), abs_tol)
    keep = s > thresh
    s_inv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    out = np.conj(np.swapaxes(vh, 1, 2)) @ (s_inv[:, :, None] * np.conj(np.swapaxes(u, 1, 2)))
    return out, keep.sum(axis=1).astype(np.int64)


def _matvec_numpy(mats, vecs):
    return np.einsum("kij,kj->ki", mats, vecs)


def _matmul_numpy(a, b):
    return a @ b


def _norm_pow_sum_numpy(values, p):
    return float(np.sum(np.sqrt(np.sum(values * values, axis=1)) ** p))


IMPLEMENTATIONS = {
    "numpy": {
        "pinv": _pinv_numpy,
        "matvec": _matvec_numpy,
        "matmul": _matmul_numpy,
        "norm_pow_sum": _norm_pow_sum_numpy,
    },
}
if numba is not None:
    IMPLEMENTATIONS["numba"] = {
        "pinv": _pinv_numba,
        "matvec": _matvec_numba,
        "matmul": _matmul_numba,
        "norm_pow_sum": _norm_pow_sum_numba,
    }


def _impl(name, backend):
    return IMPLEMENTATIONS[backend or BACKEND][name]


# --------------------------------------------------------------------------
# stacked front ends
# --------------------------------------------------------------------------

def batched_pinv(mats, tol=None, backend=None):
    """Moore-Penrose pseudoinverse of every matrix in a stack.

    ``tol=None`` applies the default relative threshold
    ``max(rows, cols) * eps * sigma_1`` per matrix; a float is an absolute
    singular-value cutoff.

    Returns ``(pinvs, ranks)`` with shapes ``lead + (cols, rows)`` and ``lead``.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    lead, (rows, cols) = mats.shape[:-2], mats.shape[-2:]
    flat = np.ascontiguousarray(mats.reshape((-1, rows, cols)))
    abs_tol = -1.0 if tol is None else float(tol)
    out, ranks = _impl("pinv", backend)(flat, abs_tol)
    return out.reshape(lead + (cols, rows)), ranks.reshape(lead)


def batched_matvec(mats, vecs, backend=None):
    """``out[..., i] = sum_j mats[..., i, j] * vecs[..., j]``."""
    mats = np.asarray(mats, dtype=np.complex128)
    vecs = np.asarray(vecs, dtype=np.complex128)
    lead = mats.shape[:-2]
    rows, cols = mats.shape[-2:]
    if vecs.shape != lead + (cols,):
        raise ValueError(f"vector stack {vecs.shape} incompatible with matrices {mats.shape}")
    out = _impl("matvec", backend)(
        np.ascontiguousarray(mats.reshape((-1, rows, cols))),
        np.ascontiguousarray(vecs.reshape((-1, cols))),
    )
    return out.reshape(lead + (rows,))


def batched_matmul(a, b, backend=None):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[:-2] != b.shape[:-2] or a.shape[-1] != b.shape[-2]:
        raise ValueError(f"cannot multiply stacks {a.shape} and {b.shape}")
    lead = a.shape[:-2]
    out = _impl("matmul", backend)(
        np.ascontiguousarray(a.reshape((-1,) + a.shape[-2:])),
        np.ascontiguousarray(b.reshape((-1,) + b.shape[-2:])),
    )
    return out.reshape(lead + (a.shape[-2], b.shape[-1]))


def fiber_norm_pow_sum(values, p, backend=None):
    """Sum over points of ``|v(x)|**p``, ``|.|`` Euclidean across the last axis."""
    values = np.asarray(values, dtype=np.float64)
    flat = np.ascontiguousarray(values.reshape((-1, values.shape[-1])))
    return float(_impl("norm_pow_sum", backend)(flat, float(p)))
