"""First-order constant-coefficient operators ``P = sum_i A_i d/dx_i`` and their symbols."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import RankTolerance, numeric_rank


@dataclass(frozen=True, eq=False)
class Operator:
    """Operator from ``dim_u``-vector fields to ``dim_v``-vector fields on R^n.

    ``coeffs`` has shape ``(n, dim_v, dim_u)``; ``coeffs[i]`` multiplies the
    partial derivative along axis ``i``. Coefficients are real.
    """

    coeffs: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64)
        if c.ndim != 3 or min(c.shape) < 1:
            raise ValueError(f"coefficients must have shape (n, dim_v, dim_u), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_matrices(cls, matrices, name=""):
        return cls(np.array([np.asarray(m, dtype=np.float64) for m in matrices]), name=name)

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def dim_v(self) -> int:
        return self.coeffs.shape[1]

    @property
    def dim_u(self) -> int:
        return self.coeffs.shape[2]

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def scaled(self, factor: float) -> "Operator":
        return Operator(factor * self.coeffs, name=self.name)

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.coeffs.shape, self.coeffs.tobytes()))

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Operator({label}n={self.n}, dim_u={self.dim_u}, dim_v={self.dim_v})"


def _check_xi(op: Operator, xi):
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape[-1:] != (op.n,):
        raise ValueError(f"frequency vector has length {xi.shape[-1:]}, operator dimension is {op.n}")
    return xi


def symbol_at(op: Operator, xi):
    """``P(xi) = sum_i xi_i A_i`` as a complex matrix.

    ``xi`` may carry leading axes, in which case a stack of symbols is returned.
    """
    xi = _check_xi(op, xi)
    return np.tensordot(xi, op.coeffs, axes=([-1], [0])).astype(np.complex128)


def symbol_at_i(op: Operator, xi):
    """``P(i xi) = i P(xi)``, the multiplier acting on the Fourier mode ``exp(i x.xi)``."""
    return 1j * symbol_at(op, xi)


def adjoint(op: Operator) -> Operator:
    """Formal adjoint ``P* = -sum_i A_i^T d/dx_i``."""
    return Operator(-np.transpose(op.coeffs, (0, 2, 1)), name=f"{op.name}*" if op.name else "")


def sphere_samples(n: int, count: int, seed: int = 0):
    """Unit vectors: the ``2n`` signed axes followed by ``count - 2n`` random directions."""
    if n < 1:
        raise ValueError("dimension must be positive")
    if count < 2 * n:
        raise ValueError(f"need at least {2 * n} samples to cover the signed axes, got {count}")
    axes = np.zeros((2 * n, n))
    for i in range(n):
        axes[2 * i, i] = 1.0
        axes[2 * i + 1, i] = -1.0
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((count - 2 * n, n))
    norms = np.linalg.norm(extra, axis=1, keepdims=True)
    # a zero draw has probability zero; guard anyway
    extra = np.where(norms > 0, extra / np.where(norms > 0, norms, 1.0), np.eye(1, n))
    return np.vstack([axes, extra])


@dataclass(frozen=True)
class RankProfile:
    samples_used: int
    min_rank: int
    max_rank: int
    is_constant: bool
    witness_min: tuple
    witness_max: tuple
    method: str = "sampled verification"

    def to_dict(self):
        return {
            "samples_used": self.samples_used,
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "is_constant": self.is_constant,
            "witness_min": list(self.witness_min),
            "witness_max": list(self.witness_max),
            "method": self.method,
        }


def rank_profile(op: Operator, samples, tol: RankTolerance = None) -> RankProfile:
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[0] == 0:
        raise ValueError("rank profile needs at least one sample")
    _check_xi(op, samples)
    ranks = np.array([numeric_rank(symbol_at(op, xi), tol) for xi in samples])
    lo, hi = int(np.argmin(ranks)), int(np.argmax(ranks))
    return RankProfile(
        samples_used=len(samples),
        min_rank=int(ranks[lo]),
        max_rank=int(ranks[hi]),
        is_constant=bool(ranks[lo] == ranks[hi]),
        witness_min=tuple(float(v) for v in samples[lo]),
        witness_max=tuple(float(v) for v in samples[hi]),
    )


def sampled_rank_profile(op: Operator, count: int = 1000, seed: int = 0,
                         tol: Optional[float] = None) -> RankProfile:
    return rank_profile(op, sphere_samples(op.n, count, seed), tol)
