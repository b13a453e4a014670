"""Periodic grids, complex scalar fields, and Fourier multiplier machinery.

Everything downstream works on a uniform periodic box [0, L)^d with a
power-of-two number of points per axis.  Fields are immutable value objects
tagged with the space their sample array lives in (physical or fourier);
transforms are unitary so the plain vector 2-norm of the samples is the same
in both spaces.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Union

import numpy as np
import scipy.fft as _fft

SpaceTag = Literal["physical", "fourier"]

#: multipliers may be given as a precomputed array or a callable acting on
#: the tuple of frequency meshes (xi_1, ..., xi_d)
Symbol = Union[np.ndarray, Callable[..., np.ndarray]]


def fft_workers() -> int:
    """Worker count for FFT calls, capped by the ZLAB_THREADS env var."""
    raw = os.environ.get("ZLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Discretized periodic box [0, extent)^dim with its Fourier lattice."""

    dim: int
    extent: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (self.extent > 0 and np.isfinite(self.extent)):
            raise ValueError(f"extent must be a positive real, got {self.extent}")
        if not _is_power_of_two(self.points_per_axis) or self.points_per_axis < 16:
            raise ValueError(
                f"points_per_axis must be a power of two >= 16, got {self.points_per_axis}"
            )

    @property
    def spacing(self) -> float:
        return self.extent / self.points_per_axis

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    @property
    def num_points(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def nyquist(self) -> float:
        """Frequency pi*N/L; the lattice holds |xi| up to (N/2-1)*(2pi/L) per axis."""
        return np.pi * self.points_per_axis / self.extent

    @property
    def xi_axis(self) -> np.ndarray:
        """1d frequency axis in fft order: xi = (2pi/L) * k, k in [-N/2, N/2)."""
        return 2 * np.pi * _fft.fftfreq(self.points_per_axis, d=self.spacing)

    @cached_property
    def xi(self) -> tuple:
        """Frequency meshes (xi_1, ..., xi_d), each of shape ``self.shape``."""
        axes = [self.xi_axis] * self.dim
        return tuple(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def xi_mag(self) -> np.ndarray:
        """|xi| on the full lattice."""
        return np.sqrt(sum(x**2 for x in self.xi))

    @cached_property
    def coords(self) -> tuple:
        """Physical coordinate meshes (x_1, ..., x_d)."""
        ax = np.arange(self.points_per_axis) * self.spacing
        return tuple(np.meshgrid(*([ax] * self.dim), indexing="ij"))

    def assert_band_within_limit(self, band: float) -> None:
        """Band-limit guard: the Nyquist frequency must exceed the band."""
        if band >= self.nyquist:
            raise ValueError(
                f"band {band} reaches the Nyquist frequency {self.nyquist:.6g} of this grid"
            )


def make_grid(dim: int, extent: float, points_per_axis: int) -> Grid:
    """Build a validated periodic grid."""
    return Grid(dim=dim, extent=float(extent), points_per_axis=int(points_per_axis))


@dataclass(frozen=True)
class Field:
    """Complex scalar on a grid; ``values`` is never mutated after creation."""

    grid: Grid
    values: np.ndarray
    space: SpaceTag

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid shape {self.grid.shape}"
            )
        if self.space not in ("physical", "fourier"):
            raise ValueError(f"unknown space tag {self.space!r}")

    def in_physical(self) -> "Field":
        return transform(self, "physical")

    def in_fourier(self) -> "Field":
        return transform(self, "fourier")

    def physical_values(self) -> np.ndarray:
        return self.in_physical().values

    def fourier_values(self) -> np.ndarray:
        return self.in_fourier().values

    def l2(self) -> float:
        """Physical L2 norm (Riemann sum); identical in either space tag."""
        return float(
            np.sqrt(self.grid.cell_volume * np.sum(np.abs(self.values) ** 2))
        )

    def __add__(self, other: "Field") -> "Field":
        a, b = _coerce_pair(self, other)
        return Field(a.grid, a.values + b.values, a.space)

    def __sub__(self, other: "Field") -> "Field":
        a, b = _coerce_pair(self, other)
        return Field(a.grid, a.values - b.values, a.space)

    def __mul__(self, scalar: complex) -> "Field":
        return Field(self.grid, self.values * scalar, self.space)

    __rmul__ = __mul__


def _coerce_pair(a: Field, b: Field):
    if a.grid is not b.grid and a.grid != b.grid:
        raise ValueError("fields live on different grids")
    if a.space != b.space:
        b = transform(b, a.space)
    return a, b


def field_from_values(grid: Grid, values: np.ndarray, space: SpaceTag = "physical") -> Field:
    vals = np.ascontiguousarray(values, dtype=np.complex128)
    return Field(grid, vals, space)


def zero_field(grid: Grid, space: SpaceTag = "fourier") -> Field:
    return Field(grid, np.zeros(grid.shape, dtype=np.complex128), space)


def plane_wave(grid: Grid, wavevector) -> Field:
    """exp(i k.x) for a lattice wavevector k."""
    k = np.atleast_1d(np.asarray(wavevector, dtype=float))
    if k.shape != (grid.dim,):
        raise ValueError(f"wavevector must have {grid.dim} components")
    phase = sum(kj * xj for kj, xj in zip(k, grid.coords))
    return Field(grid, np.exp(1j * phase), "physical")


def transform(field: Field, target: SpaceTag) -> Field:
    """Unitary DFT between physical and fourier tags (no-op if already there)."""
    if target not in ("physical", "fourier"):
        raise ValueError(f"unknown space tag {target!r}")
    if field.space == target:
        return field
    if target == "fourier":
        vals = _fft.fftn(field.values, norm="ortho", workers=fft_workers())
    else:
        vals = _fft.ifftn(field.values, norm="ortho", workers=fft_workers())
    return Field(field.grid, vals, target)


def evaluate_symbol(grid: Grid, symbol: Symbol) -> np.ndarray:
    """Evaluate a multiplier symbol on the grid's frequency lattice."""
    if callable(symbol):
        out = np.asarray(symbol(*grid.xi))
    else:
        out = np.asarray(symbol)
    if out.shape != grid.shape:
        out = np.broadcast_to(out, grid.shape)
    if not np.all(np.isfinite(out)):
        raise ValueError("multiplier symbol is not finite on the frequency lattice")
    return out


def apply_multiplier(field: Field, symbol: Symbol) -> Field:
    """Multiply the Fourier coefficients by symbol(xi); result is fourier-tagged."""
    sym = evaluate_symbol(field.grid, symbol)
    return Field(field.grid, field.fourier_values() * sym, "fourier")


def lambda_power(field: Field, power: float) -> Field:
    """|xi|^power multiplier (half-laplacian powers); zero mode is annihilated.

    Negative powers require mean-zero input: the zero-mode coefficient must
    vanish relative to the field's norm.
    """
    if power == 0:
        return field.in_fourier()
    grid = field.grid
    coef = field.fourier_values()
    zero = (0,) * grid.dim
    if power < 0:
        total = np.sqrt(np.sum(np.abs(coef) ** 2))
        if total > 0 and abs(coef[zero]) > 1e-12 * total:
            raise ValueError(
                "mean-zero data required for negative powers of the half-laplacian"
            )
    mag = grid.xi_mag
    sym = np.zeros(grid.shape)
    nz = mag > 0
    sym[nz] = mag[nz] ** power
    return Field(grid, coef * sym, "fourier")
