"""Vector fields on the periodic torus ``[0, 2pi)^n`` and Fourier multipliers.

Grids have an odd number ``N`` of points per axis so that every nonzero
frequency ``xi`` has its partner ``-xi`` on the lattice; there is no unpaired
Nyquist mode. Spectra are stored centred: array index ``k`` along an axis holds
frequency ``k - (N - 1) // 2``. The forward transform divides by ``N**n`` so
the zero-frequency coefficient is the mean of the field, and
``f(x) = sum_xi c(xi) exp(i x.xi)`` holds exactly on the grid.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

IMAG_TOL = 1e-10


class ImaginaryResidualError(ValueError):
    """A transform expected to be real produced a significant imaginary part."""


def _check_grid_shape(shape, n):
    sizes = set(shape[:n])
    if len(sizes) != 1:
        raise ValueError(f"grid must be cubic, got axes {shape[:n]}")
    size = sizes.pop()
    if size % 2 == 0:
        raise ValueError(f"grid size must be odd, got {size}")
    return size


@dataclass(frozen=True, eq=False)
class GridField:
    """Real samples of shape ``(N,) * n + (dim,)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim < 2:
            raise ValueError("grid field needs at least one spatial axis and a fiber axis")
        _check_grid_shape(v.shape, v.ndim - 1)
        if not np.all(np.isfinite(v)):
            raise ValueError("grid field has non-finite samples")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.ndim - 1

    @property
    def grid_size(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[-1]

    def __add__(self, other):
        return GridField(self.values + other.values)

    def __sub__(self, other):
        return GridField(self.values - other.values)

    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True, eq=False)
class SpectrumField:
    """Centred Fourier coefficients of shape ``(N,) * n + (dim,)``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        _check_grid_shape(c.shape, c.ndim - 1)
        object.__setattr__(self, "coefficients", c)

    @property
    def n(self):
        return self.coefficients.ndim - 1

    @property
    def grid_size(self):
        return self.coefficients.shape[0]

    @property
    def dim(self):
        return self.coefficients.shape[-1]

    def coefficient(self, xi):
        half = (self.grid_size - 1) // 2
        return self.coefficients[tuple(int(k) + half for k in xi)]


@dataclass(frozen=True, eq=False)
class MultiplierBank:
    """One ``out_dim x in_dim`` matrix per lattice frequency, ``(N,) * n + (out, in)``.

    The zero-frequency matrix is stored like any other entry.
    """

    matrices: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrices, dtype=np.complex128)
        m.setflags(write=False)
        if m.ndim < 3:
            raise ValueError("multiplier bank needs spatial axes plus a matrix")
        _check_grid_shape(m.shape, m.ndim - 2)
        object.__setattr__(self, "matrices", m)

    @property
    def n(self):
        return self.matrices.ndim - 2

    @property
    def grid_size(self):
        return self.matrices.shape[0]

    @property
    def out_dim(self):
        return self.matrices.shape[-2]

    @property
    def in_dim(self):
        return self.matrices.shape[-1]

    def at(self, xi):
        half = (self.grid_size - 1) // 2
        return self.matrices[tuple(int(k) + half for k in xi)]

    def zero_mode(self):
        return self.at((0,) * self.n)

    def then(self, other: "MultiplierBank") -> "MultiplierBank":
        """Pointwise product ``other(xi) @ self(xi)``: apply ``self`` first."""
        return MultiplierBank(kernels.batched_matmul(other.matrices, self.matrices))

    def is_hermitian_symmetric(self, tol=1e-12):
        flipped = np.flip(self.matrices, axis=tuple(range(self.n)))
        return bool(np.max(np.abs(flipped - np.conj(self.matrices)), initial=0.0) <= tol)


def frequencies(n: int, grid_size: int):
    """Integer frequency vectors on the centred lattice, shape ``(N,) * n + (n,)``."""
    if grid_size % 2 == 0:
        raise ValueError(f"grid size must be odd, got {grid_size}")
    half = (grid_size - 1) // 2
    axis = np.arange(-half, half + 1, dtype=np.float64)
    return np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1)


def grid_points(n: int, grid_size: int):
    axis = 2.0 * np.pi * np.arange(grid_size) / grid_size
    return np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1)


def forward_dft(f: GridField) -> SpectrumField:
    axes = tuple(range(f.n))
    coeffs = np.fft.fftn(f.values, axes=axes) / f.grid_size ** f.n
    return SpectrumField(np.fft.fftshift(coeffs, axes=axes))


def _to_real(values, what):
    scale = max(1.0, float(np.max(np.abs(values.real), initial=0.0)))
    residual = float(np.max(np.abs(values.imag), initial=0.0))
    if residual > IMAG_TOL * scale:
        raise ImaginaryResidualError(
            f"{what} left an imaginary residual {residual:.3e}; multiplier is not Hermitian-symmetric"
        )
    return values.real.copy()


def inverse_dft(spec: SpectrumField) -> GridField:
    axes = tuple(range(spec.n))
    values = np.fft.ifftn(np.fft.ifftshift(spec.coefficients, axes=axes), axes=axes)
    return GridField(_to_real(values * spec.grid_size ** spec.n, "inverse transform"))


def apply_spectral(spec: SpectrumField, bank: MultiplierBank) -> SpectrumField:
    _check_bank(bank, spec.n, spec.grid_size, spec.dim)
    return SpectrumField(kernels.batched_matvec(bank.matrices, spec.coefficients))


def apply_multiplier(f: GridField, bank: MultiplierBank) -> GridField:
    """Field whose transform is ``M(xi) f^(xi)`` at every lattice frequency."""
    _check_bank(bank, f.n, f.grid_size, f.dim)
    return inverse_dft(apply_spectral(forward_dft(f), bank))


def _check_bank(bank, n, grid_size, dim):
    if bank.n != n or bank.grid_size != grid_size:
        raise ValueError(
            f"bank lives on an n={bank.n}, N={bank.grid_size} grid; field on n={n}, N={grid_size}"
        )
    if bank.in_dim != dim:
        raise ValueError(f"bank expects fiber dimension {bank.in_dim}, field has {dim}")


def derivative_bank(n: int, grid_size: int, j: int, dim: int = 1) -> MultiplierBank:
    """``i xi_j`` times the identity on the fiber."""
    if not 0 <= j < n:
        raise ValueError(f"axis {j} out of range for n={n}")
    xi_j = frequencies(n, grid_size)[..., j]
    return MultiplierBank((1j * xi_j)[..., None, None] * np.eye(dim))


def partial_derivative(f: GridField, j: int) -> GridField:
    """Spectral derivative along axis ``j`` (0-based)."""
    if not 0 <= j < f.n:
        raise ValueError(f"axis {j} out of range for n={f.n}")
    spec = forward_dft(f).coefficients
    xi_j = frequencies(f.n, f.grid_size)[..., j]
    return inverse_dft(SpectrumField(1j * xi_j[..., None] * spec))


def lp_norm(f: GridField, p: float) -> float:
    """``(sum_x |f(x)|^p (2pi/N)^n)^(1/p)`` with ``|.|`` the Euclidean fiber norm."""
    if not (np.isfinite(p) and p > 1.0):
        raise ValueError(f"exponent must satisfy 1 < p < inf, got {p}")
    cell = (2.0 * np.pi / f.grid_size) ** f.n
    return (kernels.fiber_norm_pow_sum(f.values, p) * cell) ** (1.0 / p)


def random_band_limited(n: int, grid_size: int, dim: int, bandwidth: int, seed: int) -> GridField:
    """Real zero-mean field with Gaussian coefficients on ``0 < |xi|_inf <= bandwidth``."""
    half = (grid_size - 1) // 2
    if not 1 <= bandwidth <= half:
        raise ValueError(f"bandwidth must lie in [1, {half}] for N={grid_size}, got {bandwidth}")
    rng = np.random.default_rng(seed)
    shape = (grid_size,) * n + (dim,)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    axes = tuple(range(n))
    # Hermitian symmetrisation: c(-xi) = conj(c(xi))
    z = 0.5 * (z + np.conj(np.flip(z, axis=axes)))
    freqs = frequencies(n, grid_size)
    band = np.max(np.abs(freqs), axis=-1)
    z[(band > bandwidth) | (band == 0)] = 0.0
    return inverse_dft(SpectrumField(z))
