"""Dyadic frequency bands, angular cone partitions, and paraproduct splitting.

The radial cutoff ``psi`` equals 1 on [0, 1], vanishes on [9/8, inf), and
bridges with the standard exp(-1/x) smooth step, so it is infinitely smooth
and reproducible bit for bit.  The band profile is phi(s) = psi(s/2) - psi(s),
giving the annulus s in (1, 9/4).  Band multipliers are phi(|xi|/lam) for
dyadic lam and psi(|xi|/lam) for the low-pass.

Note on the lambda = 1 band: with these profiles the identity

    psi(|xi|) + sum_{lam in {1, 2, 4, ...}} phi(|xi|/lam) = psi(|xi| / (2*max))

only telescopes to 1 when the unit annulus phi(|xi|) is part of the sum, so
the ladder's band list starts at lam = 1 and ``project_dyadic`` accepts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import scipy.fft

from .grid import Field, Grid, apply_multiplier, fft_workers

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _fftn(values: np.ndarray) -> np.ndarray:
    return scipy.fft.fftn(values, norm="ortho", workers=fft_workers())


def _ifftn(values: np.ndarray) -> np.ndarray:
    return scipy.fft.ifftn(values, norm="ortho", workers=fft_workers())


def _exp_step(x: np.ndarray) -> np.ndarray:
    """s(x) = exp(-1/x) for x > 0, else 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(r) -> np.ndarray:
    """Radial cutoff psi: 1 for r <= 1, 0 for r >= 9/8, smooth in between."""
    r = np.asarray(r, dtype=float)
    a = _exp_step((9.0 / 8.0 - r) * 8.0)
    b = _exp_step((r - 1.0) * 8.0)
    denom = a + b
    safe = denom > 0
    val = np.zeros_like(r)
    val[safe] = a[safe] / denom[safe]
    val = np.where(r <= 1.0, 1.0, val)
    val = np.where(r >= 9.0 / 8.0, 0.0, val)
    return val


def band_profile(s) -> np.ndarray:
    """phi(s) = psi(s/2) - psi(s); supported on the annulus 1 < s < 9/4."""
    s = np.asarray(s, dtype=float)
    return smooth_step(s / 2.0) - smooth_step(s)


def smooth_bump(x) -> np.ndarray:
    """C-infinity bump on (-1, 1), value exp(-1) at 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(1.0 / (x[inside] ** 2 - 1.0))
    return out


def is_dyadic(lam: float) -> bool:
    if lam < 1:
        return False
    k = round(math.log2(lam))
    return 2.0**k == lam


@dataclass(frozen=True)
class DyadicLadder:
    """The multiplier family {psi, phi, P_lam, P_<=lam} usable on a grid."""

    max_band: int

    @staticmethod
    def for_grid(grid: Grid) -> "DyadicLadder":
        """Largest ladder whose top annulus (lam, 9/4*lam] fits on the lattice."""
        xi_max = (2 * np.pi / grid.extent) * (grid.points_per_axis // 2 - 1)
        lam = 1
        while 2 * lam * 9 / 4 <= xi_max:
            lam *= 2
        grid.assert_band_within_limit(lam)
        return DyadicLadder(max_band=lam)

    def psi(self, r):
        return smooth_step(r)

    def phi(self, r):
        return band_profile(r)

    @property
    def bands(self) -> List[int]:
        """Annular band sizes 1, 2, 4, ..., max_band."""
        out = []
        lam = 1
        while lam <= self.max_band:
            out.append(lam)
            lam *= 2
        return out

    def check_band(self, lam: float) -> int:
        if not is_dyadic(lam):
            raise ValueError(f"band must be a dyadic number >= 1, got {lam}")
        if lam > self.max_band:
            raise ValueError(f"band {lam} exceeds max_band {self.max_band}")
        return int(lam)

    def band_symbol(self, grid: Grid, lam: float) -> np.ndarray:
        return band_profile(grid.xi_mag / float(lam))

    def low_symbol(self, grid: Grid, lam: float) -> np.ndarray:
        return smooth_step(grid.xi_mag / float(lam))


def project_dyadic(field_in: Field, lam: float, ladder: DyadicLadder) -> Field:
    """P_lam: multiply coefficients by phi(|xi|/lam); annulus (lam, 9/4 lam)."""
    lam = ladder.check_band(lam)
    return apply_multiplier(field_in, ladder.band_symbol(field_in.grid, lam))


def project_low(field_in: Field, lam: float, ladder: DyadicLadder) -> Field:
    """P_<=lam: multiply coefficients by psi(|xi|/lam)."""
    lam = ladder.check_band(lam)
    return apply_multiplier(field_in, ladder.low_symbol(field_in.grid, lam))


def _projective_angle(dots: np.ndarray) -> np.ndarray:
    """Angle in [0, pi/2] between lines spanned by unit vectors, from |u.w|."""
    return np.arccos(np.clip(np.abs(dots), 0.0, 1.0))


def _directions_2d(count: int) -> np.ndarray:
    ang = np.arange(count) * (np.pi / count)
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _directions_3d_base() -> np.ndarray:
    """49 projective directions from primitive integer vectors with entries <= 2."""
    vecs = []
    seen = set()
    for a in range(-2, 3):
        for b in range(-2, 3):
            for c in range(-2, 3):
                if (a, b, c) == (0, 0, 0):
                    continue
                g = math.gcd(math.gcd(abs(a), abs(b)), abs(c))
                v = (a // g, b // g, c // g)
                if max(map(abs, v)) > 2:
                    continue
                canon = v if v > tuple(-x for x in v) else tuple(-x for x in v)
                if canon not in seen:
                    seen.add(canon)
                    vecs.append(canon)
    # axes first so they are guaranteed members
    vecs.sort(key=lambda v: (sum(x != 0 for x in v), v))
    arr = np.array(vecs, dtype=float)
    return arr / np.linalg.norm(arr, axis=1, keepdims=True)


def _directions_3d_fibonacci(count: int) -> np.ndarray:
    i = np.arange(count)
    z = (i + 0.5) / count
    rho = np.sqrt(1.0 - z**2)
    phi = i * _GOLDEN_ANGLE
    pts = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    axes = np.eye(3)
    return np.concatenate([axes, pts], axis=0)


def _test_directions(dim: int) -> np.ndarray:
    if dim == 2:
        ang = np.linspace(0, np.pi, 721)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return _directions_3d_fibonacci(4096)


@dataclass
class AngularPartition:
    """Smooth partition of unity {Q_i} on the sphere by cone-shaped patches.

    Each patch is supported where |xi . omega_i| >= kappa |xi'|, with xi' the
    projection onto the hyperplane orthogonal to omega_i; patches come in
    antipodal pairs (the windows depend on |u . omega|).
    """

    dim: int
    directions: np.ndarray
    cone_constant: float
    _symbols: Dict[Tuple, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    @property
    def patch_count(self) -> int:
        return len(self.directions)

    @property
    def cap_angle(self) -> float:
        """Angular radius of the cone |u.omega| >= kappa |u'|."""
        return math.atan(1.0 / self.cone_constant)

    @staticmethod
    def build(dim: int, kappa: float = 2.0) -> "AngularPartition":
        if dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
        if kappa < 1:
            raise ValueError("cone constant must be >= 1")
        theta = math.atan(1.0 / kappa)
        if dim == 1:
            dirs = np.array([[1.0]])
            return AngularPartition(dim, dirs, kappa)
        if dim == 2:
            count = 2 * math.ceil(np.pi / (2 * theta))
            dirs = _directions_2d(count)
            part = AngularPartition(dim, dirs, kappa)
        else:
            dirs = _directions_3d_base()
            part = AngularPartition(dim, dirs, kappa)
            tries = 0
            count = 128
            while not part._covers() and tries < 8:
                part = AngularPartition(dim, _directions_3d_fibonacci(count), kappa)
                count *= 2
                tries += 1
        if not part._covers():
            raise ValueError(f"could not cover the sphere with kappa={kappa} cones")
        return part

    def _window_values(self, unit_vectors: np.ndarray) -> np.ndarray:
        """Raw window weights, shape (npoints, patch_count)."""
        dots = unit_vectors @ self.directions.T
        ang = _projective_angle(dots)
        return smooth_bump(ang / self.cap_angle)

    def _covers(self) -> bool:
        w = self._window_values(_test_directions(self.dim))
        return bool(np.all(w.sum(axis=1) > 1e-8))

    def axis_of(self, i: int) -> int:
        """Index of the coordinate axis closest to direction i."""
        return int(np.argmax(np.abs(self.directions[i])))

    def axis_patch(self, j: int) -> int:
        """Index of the patch whose direction is the coordinate axis e_j."""
        dots = np.abs(self.directions[:, j])
        i = int(np.argmax(dots))
        if not np.isclose(dots[i], 1.0, atol=1e-12):
            raise ValueError(f"axis {j} is not among the patch directions")
        return i

    def patch_symbol(self, grid: Grid, i: int) -> np.ndarray:
        """Q_i(xi/|xi|) on the lattice; the xi = 0 point is set to 0."""
        if not (0 <= i < self.patch_count):
            raise ValueError(f"patch index {i} out of range (0..{self.patch_count - 1})")
        key = (grid.dim, grid.extent, grid.points_per_axis, i)
        cached = self._symbols.get(key)
        if cached is not None:
            return cached
        mag = grid.xi_mag
        nz = mag > 0
        units = np.stack([x[nz] / mag[nz] for x in grid.xi], axis=1)
        w = self._window_values(units)
        total = w.sum(axis=1)
        sym = np.zeros(grid.shape)
        sym[nz] = w[:, i] / total
        self._symbols[key] = sym
        return sym


def project_angular(
    field_in: Field,
    lam: float,
    direction_index: int,
    partition: AngularPartition,
    ladder: DyadicLadder,
) -> Field:
    """P_{lam, omega_i}: coefficients times Q_i(xi/|xi|) phi(|xi|/lam)."""
    lam = ladder.check_band(lam)
    grid = field_in.grid
    sym = partition.patch_symbol(grid, direction_index) * ladder.band_symbol(grid, lam)
    return apply_multiplier(field_in, sym)


def _support_guard(f: Field, limit: float) -> None:
    coef = f.fourier_values()
    total = np.sqrt(np.sum(np.abs(coef) ** 2))
    if total == 0:
        return
    outside = f.grid.xi_mag > limit
    leak = np.sqrt(np.sum(np.abs(coef[outside]) ** 2))
    if leak > 1e-12 * total:
        raise ValueError(
            f"aliasing guard: inputs must be band-limited below {limit:.6g}"
        )


def bony_split(
    u: Field, v: Field, sigma: float, ladder: DyadicLadder
) -> Tuple[Field, Field, Field]:
    """Paraproduct pieces of P_sigma(uv): (high-low, low-high, balanced).

    Every block pair is routed to exactly one piece (u-band at least 8x the
    v-band, at most 1/8 of it, or in between), so the three pieces sum to
    P_sigma(uv) up to roundoff.  Inputs must be band-limited below
    max_band / 4 so the physical products do not alias.
    """
    sigma = ladder.check_band(sigma)
    grid = u.grid
    if v.grid != grid:
        raise ValueError("fields live on different grids")
    limit = 2.25 * ladder.max_band / 4.0
    _support_guard(u, limit)
    _support_guard(v, limit)

    # blocks: the <=1 low-pass plus annular bands; nominal sizes 1, lam
    blocks = [(1.0, ladder.low_symbol(grid, 1))]
    for lam in ladder.bands:
        blocks.append((float(lam), ladder.band_symbol(grid, lam)))

    uhat = u.fourier_values()
    vhat = v.fourier_values()
    u_parts = [_ifftn(uhat * sym) for _, sym in blocks]
    v_parts = [_ifftn(vhat * sym) for _, sym in blocks]

    acc = {
        "high_low": np.zeros(grid.shape, dtype=np.complex128),
        "low_high": np.zeros(grid.shape, dtype=np.complex128),
        "balanced": np.zeros(grid.shape, dtype=np.complex128),
    }
    for iu, (su, _) in enumerate(blocks):
        for iv, (sv, _) in enumerate(blocks):
            ratio = su / sv
            if ratio >= 8.0:
                key = "high_low"
            elif ratio <= 1.0 / 8.0:
                key = "low_high"
            else:
                key = "balanced"
            acc[key] += u_parts[iu] * v_parts[iv]

    band = ladder.band_symbol(grid, sigma)
    out = []
    for key in ("high_low", "low_high", "balanced"):
        coef = _fftn(acc[key]) * band
        out.append(Field(grid, coef, "fourier"))
    return tuple(out)
