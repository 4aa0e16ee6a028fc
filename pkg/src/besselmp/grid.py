"""Periodic grids, real fields, and Fourier-side operators.

Everything downstream works on a uniform grid over a cube of side
``box_length`` centered at the origin, with the discrete Fourier transform
supplying exact application of multipliers m(xi) = (1 + |xi|^2)^s at the
grid frequencies xi_k = 2*pi*k / box_length.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "Spectrum",
    "make_grid",
    "transform",
    "inverse_transform",
    "apply_multiplier",
    "spectral_derivative",
    "bessel_norm_sq",
    "weighted_norm_sq",
    "lp_norm",
    "constant_field",
    "field_from_function",
    "random_field",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-box_length/2, box_length/2)^dim."""

    dim: int
    n: int
    box_length: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if int(self.n) != self.n or self.n <= 0:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not (self.box_length > 0.0 and np.isfinite(self.box_length)):
            raise ValueError(f"box_length must be positive and finite, got {self.box_length}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "box_length", float(self.box_length))
        if self.n < 8:
            warnings.warn(f"n={self.n} is very coarse; results will be poorly resolved")
        elif self.n & (self.n - 1) != 0:
            # numpy's mixed-radix FFT stays exact, only speed suffers
            warnings.warn(f"n={self.n} is not a power of two; transforms will be slower")

    @property
    def spacing(self) -> float:
        return self.box_length / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def total_points(self) -> int:
        return self.n**self.dim

    @cached_property
    def axis_coords(self) -> np.ndarray:
        """Sample positions along one axis, origin at index n//2."""
        return -0.5 * self.box_length + self.spacing * np.arange(self.n)

    def coords(self) -> tuple:
        """Tuple of dim coordinate arrays of shape ``self.shape`` (ij indexing)."""
        return tuple(np.meshgrid(*(self.axis_coords,) * self.dim, indexing="ij"))

    @cached_property
    def radius_sq(self) -> np.ndarray:
        """|x|^2 at every grid point."""
        out = np.zeros(self.shape)
        for c in self.coords():
            out += c**2
        return out

    @cached_property
    def axis_freqs(self) -> np.ndarray:
        """Angular frequencies 2*pi*k/box_length in FFT layout along one axis."""
        return (2.0 * np.pi) * np.fft.fftfreq(self.n, d=self.spacing)

    @cached_property
    def freq_sq(self) -> np.ndarray:
        """|xi|^2 on the full frequency lattice, FFT layout."""
        out = np.zeros(self.shape)
        mesh = np.meshgrid(*(self.axis_freqs,) * self.dim, indexing="ij")
        for f in mesh:
            out += f**2
        return out


@dataclass(frozen=True, eq=False)
class Field:
    """Real scalar samples on a grid.  Immutable after construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        _require_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        _require_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar):
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex Fourier coefficients in numpy FFT layout."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, order="C", copy=True)
        if c.shape != self.grid.shape:
            raise ValueError(f"coeffs shape {c.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("spectral coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


def _require_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def make_grid(dim: int, n: int, box_length: float) -> Grid:
    """Build a periodic grid; dim in {1,2,3}, n points per axis."""
    return Grid(dim=dim, n=n, box_length=box_length)


def constant_field(grid: Grid, value: float) -> Field:
    return Field(grid, np.full(grid.shape, float(value)))


def field_from_function(grid: Grid, fn) -> Field:
    """Sample ``fn(*coords)`` on the grid."""
    return Field(grid, np.asarray(fn(*grid.coords()), dtype=np.float64))


def transform(field: Field) -> Spectrum:
    """Forward DFT (unnormalized): coefficient at k is sum_j u_j e^{-2 pi i j k / n}."""
    return Spectrum(field.grid, np.fft.fftn(field.values))


def inverse_transform(spectrum: Spectrum) -> Field:
    """Inverse DFT back to a real field.

    The coefficients must be Hermitian-symmetric up to roundoff; a
    substantial imaginary remainder means the spectrum does not represent
    a real field and is reported as an error.
    """
    v = np.fft.ifftn(spectrum.coeffs)
    scale = np.max(np.abs(v.real)) if v.size else 0.0
    if np.max(np.abs(v.imag)) > 1e-9 * max(scale, 1e-300):
        raise ValueError("spectrum is not Hermitian-symmetric: inverse transform is not real")
    return Field(spectrum.grid, v.real)


def apply_multiplier(field: Field, s: float) -> Field:
    """Apply (I - Laplacian)^s through the symbol (1 + |xi|^2)^s.

    Exact (to roundoff) on band-limited data for any real s; s < 0 smooths,
    s > 0 roughens, s = 0 is the identity.
    """
    if not np.isfinite(s):
        raise ValueError(f"multiplier order must be finite, got {s}")
    u_hat = np.fft.fftn(field.values)
    u_hat *= (1.0 + field.grid.freq_sq) ** float(s)
    return Field(field.grid, np.fft.ifftn(u_hat).real)


def spectral_derivative(field: Field, axis: int = 0, order: int = 1) -> Field:
    """Differentiate along one axis via the (i xi)^order symbol."""
    if not 0 <= axis < field.grid.dim:
        raise ValueError(f"axis {axis} out of range for dim {field.grid.dim}")
    g = field.grid
    shape = [1] * g.dim
    shape[axis] = g.n
    u_hat = np.fft.fftn(field.values) * (1j * g.axis_freqs.reshape(shape)) ** order
    return Field(g, np.fft.ifftn(u_hat).real)


def bessel_norm_sq(field: Field, alpha: float) -> float:
    """Squared norm ||(I - Laplacian)^{alpha/2} u||_{L^2}^2 over the box."""
    half = apply_multiplier(field, 0.5 * alpha)
    return float(np.sum(half.values**2) * field.grid.cell_volume)


def weighted_norm_sq(field: Field, V: Field, lam: float, alpha: float) -> float:
    """Squared solver norm: bessel part plus lam * integral of V u^2.

    With a nonnegative potential this dominates the plain bessel norm, so it
    controls the same embeddings with constants no worse.
    """
    _require_same_grid(field, V)
    if not (lam > 0 and np.isfinite(lam)):
        raise ValueError(f"lam must be positive, got {lam}")
    if np.min(V.values) < 0:
        raise ValueError("potential must be nonnegative")
    pot = lam * float(np.sum(V.values * field.values**2) * field.grid.cell_volume)
    return bessel_norm_sq(field, alpha) + pot


def lp_norm(field: Field, r: float) -> float:
    """L^r norm over the box, huge-r values are fine (no overflow guard needed at desk scale)."""
    if not (r >= 1 and np.isfinite(r)):
        raise ValueError(f"lp_norm needs r >= 1, got {r}")
    return float((np.sum(np.abs(field.values) ** r) * field.grid.cell_volume) ** (1.0 / r))


def random_field(grid: Grid, rng: np.random.Generator, band_fraction: float = 0.25,
                 envelope_sigma: float | None = None) -> Field:
    """Band-limited Gaussian random field.

    White noise is filtered to the lowest ``band_fraction`` of modes per
    axis (i.i.d. normal coefficients there, zero beyond), optionally damped
    by a Gaussian envelope exp(-|x|^2 / 2 sigma^2) to concentrate mass.
    """
    if not 0 < band_fraction <= 1:
        raise ValueError(f"band_fraction must lie in (0, 1], got {band_fraction}")
    w = rng.standard_normal(grid.shape)
    w_hat = np.fft.fftn(w)
    cutoff = max(1, int(band_fraction * grid.n))
    idx = np.abs(np.fft.fftfreq(grid.n) * grid.n)
    keep = np.ones(grid.shape, dtype=bool)
    for ax in range(grid.dim):
        keep &= idx.reshape((-1,) + (1,) * (grid.dim - 1 - ax)) <= cutoff
    vals = np.fft.ifftn(np.where(keep, w_hat, 0.0)).real
    if envelope_sigma is not None:
        vals = vals * np.exp(-grid.radius_sq / (2.0 * envelope_sigma**2))
    return Field(grid, vals)
