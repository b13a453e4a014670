"""Exact Fourier-side linear flows and Duhamel integration.

The Schrodinger and half-wave groups are diagonal in Fourier space, so the
only discretization error in an inhomogeneous solve is the source quadrature:
``duhamel`` transforms the source into the co-moving frame (interaction
picture), accumulates a composite trapezoid, and transforms back, which keeps
the free part exact and the source second order in the node count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal

import numpy as np

from .bands import smooth_step
from .grid import Field, Grid

EquationTag = Literal["schrodinger", "half_wave", "wave_pair"]

REALITY_TOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """Uniform time samples of a field evolving on one grid."""

    grid: Grid
    times: np.ndarray
    snapshots: List[Field]
    equation_tag: EquationTag

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(self.snapshots) != t.size:
            raise ValueError("snapshot count does not match time nodes")
        if t.size >= 2:
            dt = np.diff(t)
            if not np.all(dt > 0):
                raise ValueError("times must be strictly increasing")
            if not np.allclose(dt, dt[0], rtol=1e-12, atol=1e-15 * max(1.0, t[-1])):
                raise ValueError("times must be uniformly spaced")
        for s in self.snapshots:
            if s.grid != self.grid:
                raise ValueError("snapshots live on different grids")

    @property
    def node_count(self) -> int:
        return len(self.snapshots)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class SourceTerm:
    """Forcing sampled on the same time nodes as the trajectory it drives."""

    samples: List[Field]
    label: str = ""

    def validate_against(self, times: np.ndarray, grid: Grid) -> None:
        if len(self.samples) != np.asarray(times).size:
            raise ValueError("source sample count does not match time nodes")
        for s in self.samples:
            if s.grid != grid:
                raise ValueError("source samples live on a different grid")


def dispersion_symbol(tag: EquationTag, grid: Grid) -> np.ndarray:
    if tag == "schrodinger":
        return grid.xi_mag**2
    if tag == "half_wave":
        return grid.xi_mag
    raise ValueError(f"no scalar dispersion for tag {tag!r}")


def schrodinger_flow(field: Field, t: float) -> Field:
    """e^{it Laplacian}: coefficients times e^{-it |xi|^2}; exact L2 isometry."""
    grid = field.grid
    coef = field.fourier_values() * np.exp(-1j * t * grid.xi_mag**2)
    return Field(grid, coef, "fourier")


def half_wave_flow(field: Field, t: float) -> Field:
    """Half-wave group: coefficients times e^{-it |xi|}."""
    grid = field.grid
    coef = field.fourier_values() * np.exp(-1j * t * grid.xi_mag)
    return Field(grid, coef, "fourier")


def _require_real(field: Field, name: str) -> None:
    vals = field.physical_values()
    scale = np.max(np.abs(vals)) or 1.0
    if np.max(np.abs(vals.imag)) > REALITY_TOL * scale:
        raise ValueError(f"{name} must be real-valued in physical space")


def _require_mean_zero(field: Field, name: str) -> None:
    coef = field.fourier_values()
    total = np.sqrt(np.sum(np.abs(coef) ** 2))
    if total > 0 and abs(coef[(0,) * field.grid.dim]) > 1e-12 * total:
        raise ValueError(f"{name} must have zero mean")


def wave_flow(n0: Field, n1: Field, t: float):
    """Free wave evolution: returns (n(t), d_t n(t)).

    The zero mode is constant in time, which requires mean-zero velocity data
    (the sin(t|xi|)/|xi| multiplier is singular at the origin otherwise).
    """
    grid = n0.grid
    _require_real(n0, "n0")
    _require_real(n1, "n1")
    _require_mean_zero(n1, "n1")
    mag = grid.xi_mag
    cosm = np.cos(t * mag)
    sincm = np.where(mag > 0, np.sin(t * mag) / np.where(mag > 0, mag, 1.0), float(t))
    a = n0.fourier_values()
    b = n1.fourier_values()
    n_t = Field(grid, cosm * a + sincm * b, "fourier")
    dtn_t = Field(grid, -mag * np.sin(t * mag) * a + cosm * b, "fourier")
    return n_t, dtn_t


def wave_energy(n: Field, dtn: Field) -> float:
    """Integral of e(n) = (|d_t n|^2 + |grad n|^2) / 2 over the box."""
    grid = n.grid
    a = n.fourier_values()
    b = dtn.fourier_values()
    grad_sq = sum(np.sum(np.abs(x * a) ** 2) for x in grid.xi)
    return 0.5 * grid.cell_volume * float(np.sum(np.abs(b) ** 2) + grad_sq)


def free_trajectory(tag: EquationTag, initial: Field, T: float, M: int) -> Trajectory:
    """Free flow sampled on M+1 uniform nodes."""
    grid = initial.grid
    om = dispersion_symbol(tag, grid)
    coef0 = initial.fourier_values()
    times = np.linspace(0.0, T, M + 1)
    snaps = [Field(grid, np.exp(-1j * om * t) * coef0, "fourier") for t in times]
    return Trajectory(grid, times, snaps, tag)


def duhamel(tag: EquationTag, initial: Field, source: SourceTerm, T: float, M: int) -> Trajectory:
    """Inhomogeneous solve of i d_t u - omega(D) u = F by interaction picture.

    snapshot_m = e^{-i t_m omega} (u0 - i * trapezoid of e^{i s omega} F(s)).
    """
    if M < 8:
        raise ValueError("need at least 8 time intervals")
    grid = initial.grid
    times = np.linspace(0.0, T, M + 1)
    source.validate_against(times, grid)
    om = dispersion_symbol(tag, grid)
    dt = T / M
    coef0 = initial.fourier_values()
    snaps: List[Field] = []
    acc = np.zeros(grid.shape, dtype=np.complex128)
    prev = None
    for m, t in enumerate(times):
        w = np.exp(1j * om * t) * source.samples[m].fourier_values()
        if m > 0:
            acc = acc + (0.5 * dt) * (prev + w)
        prev = w
        snaps.append(Field(grid, np.exp(-1j * om * t) * (coef0 - 1j * acc), "fourier"))
    return Trajectory(grid, times, snaps, tag)


def kernel_cutoff(rho) -> np.ndarray:
    """chi(rho) = psi(rho/4) - psi(2 rho): equals 1 on the unit band annulus."""
    rho = np.asarray(rho, dtype=float)
    return smooth_step(rho / 4.0) - smooth_step(2.0 * rho)


def kernel_wrap_time(grid: Grid, lam: float) -> float:
    """Horizon guard: the fastest cutoff mode (speed 9 lam) must not wrap."""
    return grid.extent / (4.0 * 9.0 * float(lam))


def dispersive_kernel(lam: float, t: float, grid: Grid) -> Field:
    """Band-localized free Schrodinger kernel with continuum normalization."""
    if t > kernel_wrap_time(grid, lam) + 1e-12:
        raise ValueError(
            f"t={t} beyond the wrap-around guard {kernel_wrap_time(grid, lam):.6g}"
        )
    grid.assert_band_within_limit(4.5 * lam)
    mag = grid.xi_mag
    sym = np.exp(-1j * t * mag**2) * kernel_cutoff(mag / float(lam))
    vals = np.fft.ifftn(sym) * grid.num_points / grid.extent**grid.dim
    return Field(grid, vals, "physical")
