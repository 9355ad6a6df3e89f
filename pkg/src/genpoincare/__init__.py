"""Generalized Poincare inequalities for first-order constant-coefficient operators."""

from .complexes import (
    ComplexSpec,
    ConditionsReport,
    NotEllipticError,
    check_structure,
    completion_search,
    compose_condition,
    ellipticity_constant,
    exactness_at,
    laplace_beltrami_symbol,
)
from .linalg import (
    SvdError,
    SvdResult,
    image_projector,
    kernel_complement_projector,
    numeric_rank,
    penrose_residuals,
    pseudo_inverse,
    svd,
)
from .poincare import (
    KernelFieldError,
    PoincareReport,
    commutation_residual,
    f0_complex,
    f0_geninv,
    poincare_ratio,
    poincare_report,
    riesz_first_bank,
    riesz_identity_residual,
    riesz_second_bank,
)
from .spectral import (
    GridField,
    MultiplierBank,
    SpectrumField,
    apply_multiplier,
    forward_dft,
    inverse_dft,
    lp_norm,
    partial_derivative,
    random_band_limited,
)
from .symbol import Operator, RankProfile, adjoint, rank_profile, sphere_samples, symbol_at, symbol_at_i

__version__ = "0.1.0"
