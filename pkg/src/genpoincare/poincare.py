"""Kernel corrections ``f0`` and the empirical Poincare constant on the torus.

For an operator ``P`` with constant-rank symbol the first-order Riesz-type
transforms have multipliers ``R_j(xi) = i xi_j P^+(i xi)``. They satisfy
``sum_j A_j R_j = Id`` on the range of ``P`` and ``d_j R_k = d_k R_j``, and the
correction ``f0`` is the frequency-wise orthogonal projection of ``f`` onto
``ker P(i xi)``. The harness compares ``|D(f - f0)|_p`` with ``|Pf|_p`` over a
random band-limited ensemble.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import kernels
from .complexes import ComplexSpec, NotEllipticError, laplace_beltrami_symbol
from .spectral import (
    GridField,
    MultiplierBank,
    SpectrumField,
    apply_multiplier,
    derivative_bank,
    forward_dft,
    frequencies,
    inverse_dft,
    lp_norm,
    random_band_limited,
)
from .symbol import Operator, RankProfile, adjoint, sampled_rank_profile, sphere_samples, symbol_at_i

DEFAULT_GRID = {1: 65, 2: 33, 3: 21}
DEFAULT_ENSEMBLE = 100
DEFAULT_SPHERE_SAMPLES = 1000
P2_SLACK = 1e-6
KERNEL_TOL = 1e-12


class KernelFieldError(ValueError):
    """``Pf`` vanishes, so the Poincare ratio is undefined."""


def default_grid_size(n: int) -> int:
    return DEFAULT_GRID.get(n, 9)


def default_bandwidth(grid_size: int) -> int:
    return max(1, grid_size // 4)


# --------------------------------------------------------------------------
# multiplier banks
# --------------------------------------------------------------------------

@lru_cache(maxsize=64)
def operator_bank(op: Operator, grid_size: int) -> MultiplierBank:
    """``P(i xi)`` on the lattice: applying it computes ``Pf`` spectrally."""
    return MultiplierBank(symbol_at_i(op, frequencies(op.n, grid_size)))


def apply_operator(op: Operator, f: GridField) -> GridField:
    if f.dim != op.dim_u:
        raise ValueError(f"operator acts on {op.dim_u}-vector fields, got dim {f.dim}")
    return apply_multiplier(f, operator_bank(op, f.grid_size))


def _symbol_pinv(op: Operator, grid_size: int):
    freqs = frequencies(op.n, grid_size)
    pinv, ranks = kernels.batched_pinv(symbol_at_i(op, freqs))
    return freqs, pinv, ranks


@lru_cache(maxsize=64)
def riesz_first_bank(op: Operator, j: int, grid_size: int, zero_mode: str = "zero") -> MultiplierBank:
    """``M(xi) = i xi_j P^+(i xi)``; ``M(0)`` is zero unless ``zero_mode="identity"``.

    The identity zero mode is a fault-injection hook: it is wrong but invisible
    on mean-free inputs.
    """
    if not 0 <= j < op.n:
        raise ValueError(f"axis {j} out of range for n={op.n}")
    freqs, pinv, _ = _symbol_pinv(op, grid_size)
    mats = 1j * freqs[..., j, None, None] * pinv
    origin = (grid_size - 1) // 2
    if zero_mode == "zero":
        mats[(origin,) * op.n] = 0.0
    elif zero_mode == "identity":
        mats[(origin,) * op.n] = np.eye(op.dim_u, op.dim_v)
    else:
        raise ValueError(f"unknown zero_mode {zero_mode!r}")
    return MultiplierBank(mats)


def _inverse_laplacian(spec: ComplexSpec, grid_size: int):
    freqs = frequencies(spec.n, grid_size)
    lmat = laplace_beltrami_symbol(spec, freqs)
    inv, ranks = kernels.batched_pinv(lmat)
    nonzero = np.any(freqs != 0, axis=-1)
    bad = nonzero & (ranks < lmat.shape[-1])
    if np.any(bad):
        raise NotEllipticError(freqs[tuple(np.argwhere(bad)[0])])
    inv[~nonzero] = 0.0
    return freqs, inv


def riesz_second_bank(spec: ComplexSpec, i: int, j: int, grid_size: int) -> MultiplierBank:
    """``M(xi) = xi_i xi_j L(xi)^{-1}`` with ``M(0) = 0``."""
    for axis in (i, j):
        if not 0 <= axis < spec.n:
            raise ValueError(f"axis {axis} out of range for n={spec.n}")
    freqs, inv = _inverse_laplacian(spec, grid_size)
    return MultiplierBank((freqs[..., i] * freqs[..., j])[..., None, None] * inv)


@lru_cache(maxsize=64)
def kernel_projector_bank(op: Operator, grid_size: int) -> MultiplierBank:
    """``I - P^+(i xi) P(i xi)``; equals the identity at ``xi = 0``."""
    freqs = frequencies(op.n, grid_size)
    sym = symbol_at_i(op, freqs)
    pinv, _ = kernels.batched_pinv(sym)
    return MultiplierBank(np.eye(op.dim_u) - kernels.batched_matmul(pinv, sym))


# --------------------------------------------------------------------------
# f0 constructions
# --------------------------------------------------------------------------

def f0_geninv(op: Operator, f: GridField) -> GridField:
    """Frequency-wise orthogonal projection of ``f`` onto ``ker P(i xi)``."""
    if f.dim != op.dim_u:
        raise ValueError(f"operator acts on {op.dim_u}-vector fields, got dim {f.dim}")
    return apply_multiplier(f, kernel_projector_bank(op, f.grid_size))


def f0_complex(left_spec: ComplexSpec, f: GridField) -> GridField:
    """``f0 = f - P* P phi`` where ``phi`` solves the U-slot Laplace equation.

    ``left_spec`` is the pair ``(R, P)``. The mean of ``phi`` is fixed to zero,
    so ``f0`` keeps the mean of ``f``.
    """
    p_op = left_spec.q_op
    if f.dim != p_op.dim_u:
        raise ValueError(f"operator acts on {p_op.dim_u}-vector fields, got dim {f.dim}")
    _, inv = _inverse_laplacian(left_spec, f.grid_size)
    freqs = frequencies(f.n, f.grid_size)
    p_star_p = kernels.batched_matmul(symbol_at_i(adjoint(p_op), freqs), symbol_at_i(p_op, freqs))
    correction = MultiplierBank(kernels.batched_matmul(p_star_p, inv))
    return f - apply_multiplier(f, correction)


# --------------------------------------------------------------------------
# identities
# --------------------------------------------------------------------------

def riesz_identity_residual(op: Operator, g: GridField, zero_mode: str = "zero") -> float:
    """``max |sum_j A_j R_j h - h|`` for ``h = P g``."""
    h = apply_operator(op, g)
    total = np.zeros_like(h.values)
    for j in range(op.n):
        rj_h = apply_multiplier(h, riesz_first_bank(op, j, g.grid_size, zero_mode))
        total += rj_h.values @ op.coeffs[j].T
    return float(np.max(np.abs(total - h.values)))


def commutation_residual(op: Operator, h: GridField, j: int, k: int) -> float:
    """``max |d_j R_k h - d_k R_j h|``."""
    if h.dim != op.dim_v:
        raise ValueError(f"transforms act on {op.dim_v}-vector fields, got dim {h.dim}")
    if j == k:
        return 0.0
    n, size = op.n, h.grid_size
    left = apply_multiplier(apply_multiplier(h, riesz_first_bank(op, k, size)),
                            derivative_bank(n, size, j, op.dim_u))
    right = apply_multiplier(apply_multiplier(h, riesz_first_bank(op, j, size)),
                             derivative_bank(n, size, k, op.dim_u))
    return float(np.max(np.abs(left.values - right.values)))


# --------------------------------------------------------------------------
# Poincare ratio
# --------------------------------------------------------------------------

class _RatioPlan:
    """Spectral data for one operator on one grid, reused across an ensemble."""

    def __init__(self, op: Operator, grid_size: int):
        self.op = op
        self.grid_size = grid_size
        self.freqs = frequencies(op.n, grid_size)
        self.symbol = symbol_at_i(op, self.freqs)
        self.pinv, self.ranks = kernels.batched_pinv(self.symbol)
        self.range_proj = kernels.batched_matmul(self.pinv, self.symbol)

    def ratio(self, f: GridField, p: float, reading: str = "jacobian") -> float:
        op = self.op
        if f.dim != op.dim_u or f.n != op.n or f.grid_size != self.grid_size:
            raise ValueError("field does not match the operator/grid of this plan")
        fhat = forward_dft(f).coefficients
        pf = inverse_dft(SpectrumField(kernels.batched_matvec(self.symbol, fhat)))
        if pf.max_abs() <= KERNEL_TOL * max(f.max_abs(), np.finfo(float).tiny):
            raise KernelFieldError("f is in the kernel of P; ratio undefined")
        # f - f0 = P^+ P f frequency-wise
        diff = kernels.batched_matvec(self.range_proj, fhat)
        partials = [inverse_dft(SpectrumField(1j * self.freqs[..., j, None] * diff)).values
                    for j in range(op.n)]
        if reading == "jacobian":
            top = GridField(np.concatenate(partials, axis=-1))
        elif reading == "sum":
            top = GridField(np.sum(partials, axis=0))
        else:
            raise ValueError(f"unknown norm reading {reading!r}")
        return lp_norm(top, p) / lp_norm(pf, p)

    def lattice_bound(self) -> float:
        """``max_{xi != 0} |xi| |P^+(i xi)|``, exact for p = 2 on this grid."""
        norms = np.linalg.norm(self.pinv, ord=2, axis=(-2, -1))
        return float(np.max(np.linalg.norm(self.freqs, axis=-1) * norms))

    def lattice_ranks(self):
        nonzero = np.any(self.freqs != 0, axis=-1)
        r = self.ranks[nonzero]
        return int(r.min()), int(r.max())


def poincare_ratio(op: Operator, f: GridField, p: float, reading: str = "jacobian") -> float:
    """``|D(f - f0)|_p / |Pf|_p`` with ``f0 = f0_geninv(op, f)``.

    ``reading="jacobian"`` stacks all ``n * dim_u`` partials pointwise;
    ``reading="sum"`` takes the literal vector sum over ``j`` of the partials.
    """
    return _RatioPlan(op, f.grid_size).ratio(f, p, reading)


def sphere_bound(op: Operator, samples) -> float:
    """``max |P^+(i xi)|`` over unit directions."""
    pinv, _ = kernels.batched_pinv(symbol_at_i(op, np.asarray(samples, dtype=np.float64)))
    return float(np.max(np.linalg.norm(pinv, ord=2, axis=(-2, -1))))


def operator_summary(op: Operator) -> dict:
    return {
        "name": op.name,
        "n": op.n,
        "dim_u": op.dim_u,
        "dim_v": op.dim_v,
        "matrices": op.coeffs.tolist(),
    }


@dataclass
class PoincareReport:
    operator: dict
    p: float
    grid_size: int
    bandwidth: int
    seed: int
    ensemble_size: int
    reading: str
    rank_profile: RankProfile
    lattice_rank_min: int
    lattice_rank_max: int
    theoretical_bound_p2: float
    lattice_bound_p2: float
    sphere_bound_p2: float
    ratios: list = field(default_factory=list)
    empirical_constant: Optional[float] = None
    skipped: Optional[str] = None

    @property
    def p2_bound_holds(self) -> Optional[bool]:
        # the bound covers the stacked Jacobian only
        if self.p != 2 or self.reading != "jacobian" or self.empirical_constant is None:
            return None
        return self.empirical_constant <= self.theoretical_bound_p2 * (1.0 + P2_SLACK)

    def to_dict(self):
        return {
            "operator": self.operator,
            "p": self.p,
            "grid_size": self.grid_size,
            "bandwidth": self.bandwidth,
            "seed": self.seed,
            "ensemble_size": self.ensemble_size,
            "reading": self.reading,
            "rank_profile": self.rank_profile.to_dict(),
            "lattice_rank_min": self.lattice_rank_min,
            "lattice_rank_max": self.lattice_rank_max,
            "theoretical_bound_p2": self.theoretical_bound_p2,
            "lattice_bound_p2": self.lattice_bound_p2,
            "sphere_bound_p2": self.sphere_bound_p2,
            "ratios": self.ratios,
            "empirical_constant": self.empirical_constant,
            "p2_bound_holds": self.p2_bound_holds,
            "skipped": self.skipped,
        }


def ensemble(n, grid_size, dim, bandwidth, size, seed):
    """Deterministic band-limited ensemble; member ``k`` uses seed ``seed + k``."""
    for k in range(size):
        yield random_band_limited(n, grid_size, dim, bandwidth, seed + k)


def poincare_report(op: Operator, p: float = 2.0, grid_size: Optional[int] = None,
                    bandwidth: Optional[int] = None, size: int = DEFAULT_ENSEMBLE,
                    seed: int = 0, samples: int = DEFAULT_SPHERE_SAMPLES,
                    reading: str = "jacobian") -> PoincareReport:
    grid_size = grid_size or default_grid_size(op.n)
    bandwidth = bandwidth or default_bandwidth(grid_size)
    profile = sampled_rank_profile(op, samples, seed)
    plan = _RatioPlan(op, grid_size)
    lat = plan.lattice_bound()
    sph = sphere_bound(op, sphere_samples(op.n, max(samples, 2 * op.n), seed))
    lo, hi = plan.lattice_ranks()
    report = PoincareReport(
        operator=operator_summary(op),
        p=float(p),
        grid_size=grid_size,
        bandwidth=bandwidth,
        seed=seed,
        ensemble_size=size,
        reading=reading,
        rank_profile=profile,
        lattice_rank_min=lo,
        lattice_rank_max=hi,
        theoretical_bound_p2=max(lat, sph),
        lattice_bound_p2=lat,
        sphere_bound_p2=sph,
    )
    if not profile.is_constant:
        report.skipped = "symbol rank is not constant on the sampled sphere"
        return report
    ratios = []
    for f in ensemble(op.n, grid_size, op.dim_u, bandwidth, size, seed):
        try:
            ratios.append(plan.ratio(f, p, reading))
        except KernelFieldError:
            continue
    report.ratios = ratios
    report.empirical_constant = max(ratios) if ratios else None
    if not ratios:
        report.skipped = "every ensemble member lies in the kernel of P"
    return report

