"""Mixed space-time norms, Sobolev norms, and the iteration-space norms.

Mixed norms are evaluated in axis-aligned frames only: innermost Lebesgue
norm over the transverse axes, then along the distinguished axis, then in
time (composite trapezoid, or max for exponent infinity).  Spatial L^infty
is the grid maximum; a sup-accurate mode doubles the transverse resolution
by Fourier zero-padding before taking the maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
import scipy.fft

from .bands import AngularPartition, DyadicLadder
from .grid import Field, Grid, fft_workers
from .propagators import Trajectory

INF = math.inf


@dataclass(frozen=True)
class NormSpec:
    """Exponents (q, p, r) for L^q_t L^p_along L^r_transverse and the frame axis."""

    time_exponent: float
    along_exponent: float
    transverse_exponent: float
    direction: Tuple[float, ...] = (1.0,)
    sup_accurate: bool = False

    def __post_init__(self):
        for e in (self.time_exponent, self.along_exponent, self.transverse_exponent):
            if not (1 <= e):
                raise ValueError(f"exponents must lie in [1, inf], got {e}")

    def axis(self, dim: int) -> int:
        """Index of the axis the direction points along; axis-aligned only."""
        w = np.asarray(self.direction, dtype=float)
        if w.shape != (dim,):
            raise ValueError(f"direction must have {dim} components")
        nrm = np.linalg.norm(w)
        if not np.isclose(nrm, 1.0, atol=1e-12):
            raise ValueError("direction must be a unit vector")
        j = int(np.argmax(np.abs(w)))
        if not np.isclose(abs(w[j]), 1.0, atol=1e-12):
            raise ValueError("axis-aligned directions only")
        return j


def axis_spec(q: float, p: float, r: float, axis: int, dim: int, sup_accurate: bool = False) -> NormSpec:
    e = [0.0] * dim
    e[axis] = 1.0
    return NormSpec(q, p, r, tuple(e), sup_accurate)


def _oversample_transverse(coef: np.ndarray, keep_axis: int) -> np.ndarray:
    """Physical values on a grid with doubled transverse axes (zero padding)."""
    dim = coef.ndim
    out = coef
    scale = 1.0
    for ax in range(dim):
        if ax == keep_axis:
            continue
        n = out.shape[ax]
        shape = list(out.shape)
        shape[ax] = 2 * n
        padded = np.zeros(shape, dtype=np.complex128)
        lo = [slice(None)] * dim
        hi = [slice(None)] * dim
        lo[ax] = slice(0, n // 2)
        hi[ax] = slice(2 * n - (n - n // 2), 2 * n)
        src_lo = [slice(None)] * dim
        src_hi = [slice(None)] * dim
        src_lo[ax] = slice(0, n // 2)
        src_hi[ax] = slice(n // 2, n)
        padded[tuple(lo)] = out[tuple(src_lo)]
        padded[tuple(hi)] = out[tuple(src_hi)]
        out = padded
        scale *= math.sqrt(2.0)
    vals = scipy.fft.ifftn(out, norm="ortho", workers=fft_workers())
    return vals * scale


def spatial_mixed_norm(field: Field, spec: NormSpec) -> float:
    """Inner L^r over transverse axes then L^p along the frame axis."""
    grid = field.grid
    j = spec.axis(grid.dim)
    h = grid.spacing
    r = spec.transverse_exponent
    p = spec.along_exponent
    if spec.sup_accurate and r == INF and grid.dim > 1:
        vals = np.abs(_oversample_transverse(field.fourier_values(), j))
    else:
        vals = np.abs(field.physical_values())
    trans_axes = tuple(ax for ax in range(grid.dim) if ax != j)
    if not trans_axes:
        g = vals
    elif r == INF:
        g = vals.max(axis=trans_axes)
    else:
        ht = grid.extent / vals.shape[(j + 1) % grid.dim] if grid.dim > 1 else h
        g = (np.sum(vals**r, axis=trans_axes) * ht ** len(trans_axes)) ** (1.0 / r)
    if p == INF:
        return float(g.max())
    return float((np.sum(g**p) * h) ** (1.0 / p))


def _time_reduce(per_node: np.ndarray, times: np.ndarray, q: float) -> float:
    if q == INF:
        return float(np.max(per_node))
    if len(times) == 1:
        return 0.0
    return float(np.trapezoid(per_node**q, times) ** (1.0 / q))


def mixed_norm(traj: Trajectory, spec: NormSpec) -> float:
    """L^q in time of the spatial mixed norm of each snapshot."""
    per_node = np.array([spatial_mixed_norm(s, spec) for s in traj.snapshots])
    return _time_reduce(per_node, np.asarray(traj.times), spec.time_exponent)


def sobolev_norm(field: Field, s: float) -> float:
    """Inhomogeneous H^s via the lattice weight (1 + |xi|^2)^s."""
    grid = field.grid
    coef = field.fourier_values()
    w = (1.0 + grid.xi_mag**2) ** s
    return float(np.sqrt(grid.cell_volume * np.sum(w * np.abs(coef) ** 2)))


def dyadic_blocks(grid: Grid, ladder: DyadicLadder) -> List[Tuple[float, np.ndarray]]:
    """(weight size, symbol) covering every lattice frequency.

    The first block merges everything below the 2-band; the last catches the
    residual above the top annulus so norms vanish only on the zero field.
    """
    blocks: List[Tuple[float, np.ndarray]] = [(1.0, ladder.low_symbol(grid, 2) if ladder.max_band >= 2 else ladder.low_symbol(grid, 1))]
    for lam in ladder.bands:
        if lam == 1:
            continue
        blocks.append((float(lam), ladder.band_symbol(grid, lam)))
    # complement of the telescoped sum: everything above the top annulus
    blocks.append((2.0 * ladder.max_band, 1.0 - ladder.low_symbol(grid, 2 * ladder.max_band)))
    return blocks


def sobolev_norm_dyadic(field: Field, s: float, ladder: DyadicLadder) -> float:
    """Dyadic-ladder version of H^s, equivalent to ``sobolev_norm`` within 4x."""
    grid = field.grid
    coef = field.fourier_values()
    total = 0.0
    for lam, sym in dyadic_blocks(grid, ladder):
        total += lam ** (2 * s) * grid.cell_volume * float(np.sum(np.abs(sym * coef) ** 2))
    return math.sqrt(total)


@dataclass
class IterationNormFamily:
    """Parameters of the iteration spaces: dimension, regularities, cutoffs."""

    dim: int
    s: float
    l: float
    ladder: DyadicLadder
    partition: AngularPartition
    angular_s1_3d: bool = False   # sum S1 over angular projections also when d = 3

    def __post_init__(self):
        if self.partition.dim != self.dim:
            raise ValueError("partition dimension does not match")

    @property
    def regime_tag(self) -> str:
        if self.dim == 2 and self.s == 0.0 and self.l == -0.5:
            return "paper"
        if self.dim == 3 and self.s > 0 and abs(self.l - (self.s - 0.5)) < 1e-12:
            return "paper"
        return "off-regime"

    def s1_exponents(self) -> Tuple[float, float, float]:
        return (4.0, 2.0, INF) if self.dim == 2 else (2.0, 2.0, INF)

    def n1_exponents(self) -> Tuple[float, float, float]:
        return (4.0 / 3.0, 2.0, 1.0) if self.dim == 2 else (2.0, 2.0, 1.0)

    @cached_property
    def frame_counts(self) -> List[Tuple[int, int]]:
        """(axis, multiplicity) pairs from patches grouped by nearest axis."""
        counts = {}
        for i in range(self.partition.patch_count):
            j = self.partition.axis_of(i)
            counts[j] = counts.get(j, 0) + 1
        return sorted(counts.items())


def _projected_time_norm(
    traj: Trajectory, symbol: np.ndarray, q: float, p: float, r: float, axis: int
) -> float:
    grid = traj.grid
    spec = axis_spec(q, p, r, axis, grid.dim)
    per_node = np.empty(traj.node_count)
    for m, snap in enumerate(traj.snapshots):
        f = Field(grid, snap.fourier_values() * symbol, "fourier")
        per_node[m] = spatial_mixed_norm(f, spec)
    return _time_reduce(per_node, np.asarray(traj.times), q)


def s1_norm(traj: Trajectory, fam: IterationNormFamily) -> float:
    """Square sum over bands and cone patches of the directional mixed norms."""
    grid = traj.grid
    if grid.dim != fam.dim:
        raise ValueError("trajectory dimension does not match the family")
    q, p, r = fam.s1_exponents()
    blocks = dyadic_blocks(grid, fam.ladder)
    total = 0.0
    if fam.dim == 2 or fam.angular_s1_3d:
        for _, block_sym in blocks:
            for i in range(fam.partition.patch_count):
                sym = block_sym * fam.partition.patch_symbol(grid, i)
                axis = fam.partition.axis_of(i)
                total += _projected_time_norm(traj, sym, q, p, r, axis) ** 2
    else:
        # band norm without angular projection, repeated once per patch
        for _, block_sym in blocks:
            for axis, count in fam.frame_counts:
                total += count * _projected_time_norm(traj, block_sym, q, p, r, axis) ** 2
    return math.sqrt(total)


def n1_norm(traj: Trajectory, fam: IterationNormFamily) -> float:
    """Dual-exponent companion of s1_norm; bands only, with lam^{4s} weights in 3d."""
    grid = traj.grid
    if grid.dim != fam.dim:
        raise ValueError("trajectory dimension does not match the family")
    q, p, r = fam.n1_exponents()
    total = 0.0
    for lam, block_sym in dyadic_blocks(grid, fam.ladder):
        weight = lam ** (4 * fam.s) if fam.dim == 3 else 1.0
        for axis, count in fam.frame_counts:
            total += count * weight * _projected_time_norm(traj, block_sym, q, p, r, axis) ** 2
    return math.sqrt(total)


def s2_norm(traj: Trajectory, fam: IterationNormFamily) -> float:
    """L^infty in time of H^l."""
    return max(sobolev_norm(s, fam.l) for s in traj.snapshots)


def n2_norm(traj: Trajectory, fam: IterationNormFamily) -> float:
    """L^1 in time of H^l."""
    per_node = np.array([sobolev_norm(s, fam.l) for s in traj.snapshots])
    return _time_reduce(per_node, np.asarray(traj.times), 1.0)


def x_norm(traj: Trajectory, fam: IterationNormFamily) -> float:
    """max(L^infty_t H^s, S1)."""
    sup_hs = max(sobolev_norm(s, fam.s) for s in traj.snapshots)
    return max(sup_hs, s1_norm(traj, fam))
