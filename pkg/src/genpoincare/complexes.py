"""Short complexes ``U --P--> V --Q--> W`` of first-order operators.

Covers the structure conditions for ellipticity (composition, exactness at one
frequency, constant rank of both symbols), the positive Laplace-Beltrami form
``L(xi) = P(xi) P(xi)^H + Q(xi)^H Q(xi)``, the ellipticity constant, and the
linear search for completions ``Q`` of a given ``P``.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .linalg import RankTolerance, numeric_rank, rank_gap, svd
from .symbol import Operator, RankProfile, rank_profile, symbol_at

COMPOSE_TOL = 1e-10
EXACTNESS_TOL = 1e-10
WELL_POSED_GAP = 1e6


class NotEllipticError(ValueError):
    """``L(xi)`` is singular at some nonzero frequency."""

    def __init__(self, xi, message=None):
        self.witness = tuple(float(v) for v in np.ravel(xi))
        super().__init__(message or f"complex not elliptic at xi={self.witness}")


@dataclass(frozen=True)
class ComplexSpec:
    p_op: Operator
    q_op: Operator

    def __post_init__(self):
        if self.p_op.n != self.q_op.n:
            raise ValueError(f"operators act on R^{self.p_op.n} and R^{self.q_op.n}")
        if self.p_op.dim_v != self.q_op.dim_u:
            raise ValueError(
                f"P maps into dimension {self.p_op.dim_v} but Q starts from {self.q_op.dim_u}"
            )

    @property
    def n(self):
        return self.p_op.n

    @property
    def dims(self):
        return self.p_op.dim_u, self.p_op.dim_v, self.q_op.dim_v

    def scaled(self, factor: float) -> "ComplexSpec":
        return ComplexSpec(self.p_op.scaled(factor), self.q_op.scaled(factor))


@dataclass(frozen=True)
class ConditionsReport:
    cond_compose: float
    cond_exact_at_witness: bool
    exactness_witness: tuple
    cond_rank_p: RankProfile
    cond_rank_q: RankProfile
    verdict: bool
    compose_tol: float

    def to_dict(self):
        return {
            "cond_compose": self.cond_compose,
            "compose_tol": self.compose_tol,
            "cond_exact_at_witness": self.cond_exact_at_witness,
            "exactness_witness": list(self.exactness_witness),
            "cond_rank_p": self.cond_rank_p.to_dict(),
            "cond_rank_q": self.cond_rank_q.to_dict(),
            "verdict": self.verdict,
        }


def compose_condition(spec: ComplexSpec) -> float:
    """Largest Frobenius norm among ``B_i A_i`` and ``B_i A_j + B_j A_i`` (i < j).

    Zero exactly when ``Q P`` vanishes as a second-order operator.
    """
    a, b = spec.p_op.coeffs, spec.q_op.coeffs
    worst = max(np.linalg.norm(b[i] @ a[i]) for i in range(spec.n))
    for i, j in combinations(range(spec.n), 2):
        worst = max(worst, np.linalg.norm(b[i] @ a[j] + b[j] @ a[i]))
    return float(worst)


def exactness_at(spec: ComplexSpec, xi, tol: float = EXACTNESS_TOL,
                 rank_tol: RankTolerance = None) -> bool:
    """``im P(xi) == ker Q(xi)``, decided by ``QP = 0`` plus rank-nullity."""
    xi = np.asarray(xi, dtype=np.float64)
    if not np.any(xi):
        raise ValueError("exactness is only defined away from xi = 0")
    p = symbol_at(spec.p_op, xi)
    q = symbol_at(spec.q_op, xi)
    scale = 1.0 + svd(p).singular_values[0] * svd(q).singular_values[0]
    if np.linalg.norm(q @ p, 2) >= tol * scale:
        return False
    return numeric_rank(p, rank_tol) == spec.p_op.dim_v - numeric_rank(q, rank_tol)


def _well_posed(spec: ComplexSpec, xi, rank_tol) -> bool:
    return (rank_gap(symbol_at(spec.p_op, xi), rank_tol) > WELL_POSED_GAP
            and rank_gap(symbol_at(spec.q_op, xi), rank_tol) > WELL_POSED_GAP)


def check_structure(spec: ComplexSpec, samples, tol: float = COMPOSE_TOL,
                    rank_tol: RankTolerance = None) -> ConditionsReport:
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[0] == 0:
        raise ValueError("check_structure needs at least one sample")
    residual = compose_condition(spec)
    witness = samples[0]
    for xi in samples:
        if _well_posed(spec, xi, rank_tol):
            witness = xi
            break
    exact = exactness_at(spec, witness, rank_tol=rank_tol)
    prof_p = rank_profile(spec.p_op, samples, rank_tol)
    prof_q = rank_profile(spec.q_op, samples, rank_tol)
    verdict = residual < tol and exact and prof_p.is_constant and prof_q.is_constant
    return ConditionsReport(
        cond_compose=residual,
        cond_exact_at_witness=bool(exact),
        exactness_witness=tuple(float(v) for v in witness),
        cond_rank_p=prof_p,
        cond_rank_q=prof_q,
        verdict=bool(verdict),
        compose_tol=tol,
    )


def laplace_beltrami_symbol(spec: ComplexSpec, xi):
    """Positive form ``L(xi) = P(xi) P(xi)^H + Q(xi)^H Q(xi)`` on the middle space.

    Stacks of frequencies are accepted.
    """
    p = symbol_at(spec.p_op, xi)
    q = symbol_at(spec.q_op, xi)
    return p @ np.conj(np.swapaxes(p, -1, -2)) + np.conj(np.swapaxes(q, -1, -2)) @ q


def ellipticity_constant(spec: ComplexSpec, samples, rank_tol: RankTolerance = None) -> float:
    """``max |L(xi)^{-1}|`` over unit samples, so that ``|L(xi)^{-1}| <= c |xi|^-2``."""
    worst = 0.0
    for xi in np.atleast_2d(np.asarray(samples, dtype=np.float64)):
        xi = xi / np.linalg.norm(xi)
        lmat = laplace_beltrami_symbol(spec, xi)
        if numeric_rank(lmat, rank_tol) < lmat.shape[0]:
            raise NotEllipticError(xi)
        worst = max(worst, 1.0 / svd(lmat).singular_values[-1])
    return worst


def completion_system(p_op: Operator, dim_w: int):
    """Matrix of the linear map ``(B_1..B_n) -> (B_i A_i, B_i A_j + B_j A_i)``.

    Unknowns are the entries of ``B`` with shape ``(n, dim_w, dim_v)`` in C order.
    """
    n, dim_v, dim_u = p_op.n, p_op.dim_v, p_op.dim_u
    a = p_op.coeffs
    pairs = [(i, i) for i in range(n)] + list(combinations(range(n), 2))
    unknowns = n * dim_w * dim_v
    system = np.zeros((len(pairs) * dim_w * dim_u, unknowns))
    for col in range(unknowns):
        b = np.zeros(unknowns)
        b[col] = 1.0
        b = b.reshape(n, dim_w, dim_v)
        blocks = [b[i] @ a[i] if i == j else b[i] @ a[j] + b[j] @ a[i] for i, j in pairs]
        system[:, col] = np.concatenate([blk.ravel() for blk in blocks])
    return system


def completion_search(p_op: Operator, dim_w: int, tol: RankTolerance = None):
    """Orthonormal basis of all ``Q`` with ``Q P = 0``, as an array ``(k, n, dim_w, dim_v)``.

    An empty first axis means only ``Q = 0`` composes to zero with ``P``.
    """
    if dim_w < 1:
        raise ValueError("dim_w must be positive")
    system = completion_system(p_op, dim_w)
    shape = (p_op.n, dim_w, p_op.dim_v)
    _, s, vh = np.linalg.svd(system, full_matrices=True)
    if s.size and s[0] > 0:
        thresh = max(system.shape) * np.finfo(float).eps * s[0] if tol is None else tol
        rank = int(np.sum(s > thresh))
    else:
        rank = 0
    null = vh[rank:]
    return null.reshape((null.shape[0],) + shape)


def complex_from_completion(p_op: Operator, b) -> ComplexSpec:
    return ComplexSpec(p_op, Operator(np.asarray(b, dtype=np.float64)))
