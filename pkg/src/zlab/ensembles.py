"""Seeded generation of frequency-localized random fields.

Supports are sharp lattice masks chosen inside the flat part of the smooth
cutoffs, so the matching projection operators act as the identity on the
generated data: annulus(lam) sits where phi(|xi|/lam) = 1 and ball(lam)
where psi(|xi|/lam) = 1.  Every sample is reproducible from (seed, index).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .grid import Field, Grid


@dataclass(frozen=True)
class SupportSpec:
    """Sharp Fourier support: an annulus or ball, optionally cone-restricted."""

    kind: str                     # "annulus" | "ball"
    band: float
    cone_axis: Optional[int] = None
    kappa: float = 2.0
    exclude_zero: bool = True

    def mask(self, grid: Grid) -> np.ndarray:
        mag = grid.xi_mag
        if self.kind == "annulus":
            m = (mag >= 1.125 * self.band) & (mag <= 2.0 * self.band)
        elif self.kind == "ball":
            m = mag <= self.band
        else:
            raise ValueError(f"unknown support kind {self.kind!r}")
        if self.cone_axis is not None:
            along = np.abs(grid.xi[self.cone_axis])
            trans_sq = sum(
                x**2 for ax, x in enumerate(grid.xi) if ax != self.cone_axis
            )
            m = m & (along >= self.kappa * np.sqrt(trans_sq))
        if self.exclude_zero:
            m = m & (mag > 0)
        return m


@dataclass(frozen=True)
class EnsembleSpec:
    """Complex Gaussian coefficients on a sharp support, unit L2 normalized."""

    sample_count: int
    seed: int
    support: SupportSpec
    real: bool = False        # hermitian coefficients (real-valued field)
    coherent: bool = False    # all-ones coefficients (extremal phases)
    amplitude: float = 1.0


def _hermitian_part(coef: np.ndarray) -> np.ndarray:
    rev = tuple((-np.arange(n)) % n for n in coef.shape)
    return 0.5 * (coef + np.conj(coef[np.ix_(*rev)]))


def sample_field(grid: Grid, spec: EnsembleSpec, index: int) -> Field:
    """Draw sample ``index`` of the ensemble (deterministic in seed, index)."""
    mask = spec.support.mask(grid)
    if not mask.any():
        raise ValueError("ensemble support contains no lattice points")
    coef = np.zeros(grid.shape, dtype=np.complex128)
    if spec.coherent:
        coef[mask] = 1.0
    else:
        rng = np.random.default_rng([spec.seed, index])
        draws = rng.standard_normal((2, int(mask.sum())))
        coef[mask] = draws[0] + 1j * draws[1]
    if spec.real:
        coef = _hermitian_part(coef)
    nrm = np.sqrt(grid.cell_volume * np.sum(np.abs(coef) ** 2))
    if nrm == 0:
        raise ValueError("degenerate ensemble draw")
    coef *= spec.amplitude / nrm
    return Field(grid, coef, "fourier")


def generate_ensemble(spec: EnsembleSpec, grid: Grid) -> List[Field]:
    """All samples of the ensemble, in index order."""
    return [sample_field(grid, spec, i) for i in range(spec.sample_count)]


def annulus_spec(
    count: int,
    seed: int,
    band: float,
    cone_axis: Optional[int] = None,
    kappa: float = 2.0,
    real: bool = False,
) -> EnsembleSpec:
    return EnsembleSpec(
        count, seed, SupportSpec("annulus", band, cone_axis, kappa), real=real
    )


def ball_spec(
    count: int,
    seed: int,
    band: float,
    cone_axis: Optional[int] = None,
    kappa: float = 2.0,
    real: bool = False,
    exclude_zero: bool = True,
) -> EnsembleSpec:
    return EnsembleSpec(
        count,
        seed,
        SupportSpec("ball", band, cone_axis, kappa, exclude_zero),
        real=real,
    )


def coherent_sample(grid: Grid, base: EnsembleSpec) -> Field:
    """Phase-aligned extremal companion of an ensemble (same support)."""
    return sample_field(grid, replace(base, coherent=True), 0)
