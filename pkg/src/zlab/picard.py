"""The reduced first-order system and its Picard iteration.

The wave part is carried by v = n + i Lambda^{-1} d_t n, so both unknowns
obey first-order equations solved exactly in Fourier space up to source
quadrature.  Each step feeds the previous iterate's nonlinearity through the
Duhamel integral; quadratic products are dealiased with the 2/3 rule before
use.  The iteration report records the per-iterate norms, difference norms,
and the contraction quantities R_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Dict, List, Optional

import numpy as np

from .ensembles import EnsembleSpec, SupportSpec, sample_field
from .grid import Field, Grid, apply_multiplier, lambda_power
from .norms import (
    IterationNormFamily,
    n1_norm,
    s2_norm,
    sobolev_norm,
    x_norm,
)
from .propagators import SourceTerm, Trajectory, duhamel, free_trajectory

DIVERGENCE_FACTOR = 1e6


def to_first_order(n0: Field, n1: Field) -> Field:
    """v0 = n0 + i Lambda^{-1} n1 (n1 must be mean-zero)."""
    return n0.in_fourier() + 1j * lambda_power(n1, -1.0)


def from_first_order(v: Field):
    """Invert the reduction: (n, d_t n) = (Re v, Lambda Im v)."""
    grid = v.grid
    vals = v.physical_values()
    n = Field(grid, vals.real.astype(np.complex128), "physical")
    im = Field(grid, vals.imag.astype(np.complex128), "physical")
    return n, lambda_power(im, 1.0)


@dataclass(frozen=True)
class ZakharovData:
    """Initial data (E0, n0, n1) together with the derived v0."""

    E0: Field
    n0: Field
    n1: Field
    v0: Field

    @staticmethod
    def from_wave_data(E0: Field, n0: Field, n1: Field) -> "ZakharovData":
        _check_real(n0, "n0")
        _check_real(n1, "n1")
        return ZakharovData(E0, n0, n1, to_first_order(n0, n1))

    def scaled(self, factor: float) -> "ZakharovData":
        return ZakharovData(
            self.E0 * factor, self.n0 * factor, self.n1 * factor, self.v0 * factor
        )

    def perturbed(self, delta: "ZakharovData") -> "ZakharovData":
        return ZakharovData.from_wave_data(
            self.E0 + delta.E0, self.n0 + delta.n0, self.n1 + delta.n1
        )


def _check_real(f: Field, name: str) -> None:
    vals = f.physical_values()
    scale = np.max(np.abs(vals)) or 1.0
    if np.max(np.abs(vals.imag)) > 1e-12 * scale:
        raise ValueError(f"{name} must be real-valued")


def random_zakharov_data(
    grid: Grid, band: float, amplitude: float, seed: int
) -> ZakharovData:
    """Random low-frequency data with |E0| = |n0| = |n1| = amplitude in L2."""
    support = SupportSpec("ball", band, exclude_zero=True)
    e_spec = EnsembleSpec(1, seed, support, amplitude=amplitude)
    r_spec = EnsembleSpec(1, seed, support, real=True, amplitude=amplitude)
    E0 = sample_field(grid, e_spec, 0)
    n0 = sample_field(grid, r_spec, 1)
    n1 = sample_field(grid, r_spec, 2)
    return ZakharovData.from_wave_data(E0, n0, n1)


@dataclass(frozen=True)
class IterationConfig:
    family: IterationNormFamily
    grid: Grid
    horizon: float
    iterate_count: int = 8
    time_nodes: int = 64
    seed: int = 0
    keep_iterates: bool = False
    dealias: bool = True

    def __post_init__(self):
        if self.iterate_count < 4:
            raise ValueError("need at least 4 iterates")
        if self.time_nodes < 16:
            raise ValueError("need at least 16 time nodes")


@dataclass
class IterationReport:
    """Measured norms of the Picard sequence; all entries finite and >= 0."""

    config: IterationConfig
    status: str = "ok"                       # or "diverged at k"
    x_E: List[float] = dataclass_field(default_factory=list)
    s2_re_v: List[float] = dataclass_field(default_factory=list)
    n1_product: List[float] = dataclass_field(default_factory=list)
    diff_x_E: List[float] = dataclass_field(default_factory=list)
    diff_s2_re_v: List[float] = dataclass_field(default_factory=list)
    R: Dict[int, float] = dataclass_field(default_factory=dict)
    mass_drift: List[float] = dataclass_field(default_factory=list)
    e_trajs: Optional[List[Trajectory]] = None
    v_trajs: Optional[List[Trajectory]] = None
    e_sources: Optional[List[SourceTerm]] = None
    v_sources: Optional[List[SourceTerm]] = None

    @property
    def contraction_ratios(self) -> Dict[int, float]:
        ks = sorted(self.R)
        return {
            k: self.R[k + 1] / self.R[k]
            for k in ks
            if k + 1 in self.R and self.R[k] > 0
        }


def _dealias_symbol(grid: Grid, enabled: bool) -> np.ndarray:
    if not enabled:
        return np.ones(grid.shape)
    return (grid.xi_mag <= (2.0 / 3.0) * grid.nyquist).astype(float)


def _product_sources(
    e_traj: Trajectory, v_traj: Trajectory, cut: np.ndarray
):
    """Sources for the next step: (Re v) E and Lambda |E|^2, dealiased."""
    grid = e_traj.grid
    mag = grid.xi_mag
    prod_samples: List[Field] = []
    wave_samples: List[Field] = []
    for e_snap, v_snap in zip(e_traj.snapshots, v_traj.snapshots):
        e_phys = e_snap.physical_values()
        re_v = v_snap.physical_values().real
        prod = Field(grid, re_v * e_phys, "physical")
        prod_samples.append(apply_multiplier(prod, cut))
        absq = Field(grid, np.abs(e_phys) ** 2 + 0j, "physical")
        wave_samples.append(apply_multiplier(absq, cut * mag))
    return SourceTerm(prod_samples, "(Re v) E"), SourceTerm(wave_samples, "Lambda |E|^2")


def _real_part_traj(traj: Trajectory) -> Trajectory:
    snaps = [
        Field(traj.grid, s.physical_values().real.astype(np.complex128), "physical")
        for s in traj.snapshots
    ]
    return Trajectory(traj.grid, traj.times, snaps, traj.equation_tag)


def _source_traj(src: SourceTerm, times, grid: Grid, tag) -> Trajectory:
    return Trajectory(grid, times, list(src.samples), tag)


def picard_step(
    e_prev: Trajectory, v_prev: Trajectory, data: ZakharovData, config: IterationConfig
):
    """One iteration step: Duhamel solves driven by the previous nonlinearity."""
    if e_prev.node_count != config.time_nodes + 1 or v_prev.node_count != e_prev.node_count:
        raise ValueError("iterate trajectories do not match the configured time nodes")
    cut = _dealias_symbol(config.grid, config.dealias)
    src_e, src_v = _product_sources(e_prev, v_prev, cut)
    e_next = duhamel("schrodinger", data.E0, src_e, config.horizon, config.time_nodes)
    v_next = duhamel("half_wave", data.v0, src_v, config.horizon, config.time_nodes)
    return e_next, v_next


def run_iteration(data: ZakharovData, config: IterationConfig) -> IterationReport:
    """Run K Picard iterates and measure norms, differences, and R_k."""
    grid = config.grid
    fam = config.family
    T, M, K = config.horizon, config.time_nodes, config.iterate_count
    cut = _dealias_symbol(grid, config.dealias)
    report = IterationReport(config=config)
    if config.keep_iterates:
        report.e_trajs, report.v_trajs = [], []
        report.e_sources, report.v_sources = [], []

    e_traj = free_trajectory("schrodinger", data.E0, T, M)
    v_traj = free_trajectory("half_wave", data.v0, T, M)
    e_prev: Optional[Trajectory] = None
    v_prev: Optional[Trajectory] = None
    prod_prev: Optional[Trajectory] = None
    e0_l2 = data.E0.l2()
    scale0 = None

    for k in range(K + 1):
        src_e, src_v = _product_sources(e_traj, v_traj, cut)
        prod_traj = _source_traj(src_e, e_traj.times, grid, "schrodinger")

        xk = x_norm(e_traj, fam)
        s2k = s2_norm(_real_part_traj(v_traj), fam)
        n1k = n1_norm(prod_traj, fam)
        report.x_E.append(xk)
        report.s2_re_v.append(s2k)
        report.n1_product.append(n1k)
        drift = 0.0
        if e0_l2 > 0:
            masses = [s.l2() for s in e_traj.snapshots]
            drift = max(abs(m / e0_l2 - 1.0) for m in masses)
        report.mass_drift.append(drift)

        if k >= 1:
            diff_e = Trajectory(
                grid, e_traj.times,
                [a - b for a, b in zip(e_traj.snapshots, e_prev.snapshots)],
                "schrodinger",
            )
            diff_v = _real_part_traj(
                Trajectory(
                    grid, v_traj.times,
                    [a - b for a, b in zip(v_traj.snapshots, v_prev.snapshots)],
                    "half_wave",
                )
            )
            report.diff_x_E.append(x_norm(diff_e, fam))
            report.diff_s2_re_v.append(s2_norm(diff_v, fam))
            diff_prod = Trajectory(
                grid, e_traj.times,
                [a - b for a, b in zip(prod_traj.snapshots, prod_prev.snapshots)],
                "schrodinger",
            )
            report.R[k] = n1_norm(diff_prod, fam)

        if config.keep_iterates:
            report.e_trajs.append(e_traj)
            report.v_trajs.append(v_traj)
            report.e_sources.append(src_e)
            report.v_sources.append(src_v)

        if scale0 is None:
            scale0 = max(xk, s2k, 1e-300)
        if not all(map(math.isfinite, (xk, s2k, n1k))) or max(xk, s2k) > DIVERGENCE_FACTOR * scale0:
            report.status = f"diverged at {k}"
            return report

        if k == K:
            break
        e_prev, v_prev, prod_prev = e_traj, v_traj, prod_traj
        e_traj = duhamel("schrodinger", data.E0, src_e, T, M)
        v_traj = duhamel("half_wave", data.v0, src_v, T, M)
    return report


def tune_horizon(
    data: ZakharovData,
    config: IterationConfig,
    target: float = 0.5,
    k_window=(3, 7),
    max_steps: int = 8,
) -> IterationReport:
    """Geometric search over horizons T0 * 2^j for contraction in the window.

    The horizon is halved while any windowed ratio exceeds the target, and
    doubled while the late differences sit at the roundoff floor (which makes
    the measured ratios meaningless noise).
    """
    cfg = config
    best = None
    for _ in range(max_steps):
        report = run_iteration(data, cfg)
        if report.status != "ok":
            cfg = replace(cfg, horizon=cfg.horizon / 2.0)
            continue
        ratios = report.contraction_ratios
        lo, hi = k_window
        window = [ratios[k] for k in range(lo, hi + 1) if k in ratios]
        floored = _floor_suspect(report)
        if window and max(window) > target:
            cfg = replace(cfg, horizon=cfg.horizon / 2.0)
        elif floored:
            best = report
            cfg = replace(cfg, horizon=cfg.horizon * 2.0)
        else:
            return report
    return best if best is not None else report


def _floor_suspect(report: IterationReport, guard: float = 1e-13) -> bool:
    """True when the last difference is within a few digits of roundoff."""
    if not report.R:
        return False
    scale = max(report.R.values())
    return min(report.R.values()) < guard * max(scale, 1e-300)


def lipschitz_probe(
    data: ZakharovData, perturbation: ZakharovData, config: IterationConfig
) -> float:
    """Solution-difference norm over data-difference norm at the last iterate."""
    fam = config.family
    denom = sobolev_norm(perturbation.E0, fam.s) + sobolev_norm(perturbation.v0, fam.l)
    if denom == 0:
        return 0.0
    cfg2 = replace(config, keep_iterates=True)
    base = run_iteration(data, cfg2)
    pert = run_iteration(data.perturbed(perturbation), cfg2)
    for rep in (base, pert):
        if rep.status != "ok":
            raise RuntimeError(f"iteration failed: {rep.status}")
    e_diff = Trajectory(
        config.grid,
        base.e_trajs[-1].times,
        [a - b for a, b in zip(pert.e_trajs[-1].snapshots, base.e_trajs[-1].snapshots)],
        "schrodinger",
    )
    v_diff = _real_part_traj(
        Trajectory(
            config.grid,
            base.v_trajs[-1].times,
            [a - b for a, b in zip(pert.v_trajs[-1].snapshots, base.v_trajs[-1].snapshots)],
            "half_wave",
        )
    )
    num = x_norm(e_diff, fam) + s2_norm(v_diff, fam)
    return num / denom


def difference_system_check(report: IterationReport) -> Dict[int, float]:
    """Residuals of the difference-system Duhamel representation.

    E^{(k)} - E^{(k-1)} must equal the zero-data Duhamel solve driven by the
    source difference; same for v.  Requires keep_iterates.
    """
    if report.e_trajs is None:
        raise ValueError("iterates were not stored; rerun with keep_iterates")
    cfg = report.config
    grid, T, M = cfg.grid, cfg.horizon, cfg.time_nodes
    zero = Field(grid, np.zeros(grid.shape, dtype=np.complex128), "fourier")
    out: Dict[int, float] = {}
    for k in range(1, len(report.e_trajs)):
        src_diff = SourceTerm(
            [a - b for a, b in zip(report.e_sources[k - 1].samples,
                                   report.e_sources[k - 2].samples)]
            if k >= 2
            else list(report.e_sources[k - 1].samples),
            "source difference",
        )
        rebuilt = duhamel("schrodinger", zero, src_diff, T, M)
        num = 0.0
        scale = 0.0
        for m in range(rebuilt.node_count):
            direct = (
                report.e_trajs[k].snapshots[m] - report.e_trajs[k - 1].snapshots[m]
            )
            num = max(num, (direct - rebuilt.snapshots[m]).l2())
            scale = max(scale, report.e_trajs[k].snapshots[m].l2())
        # relative to the iterate scale: the differences themselves contract
        # to the roundoff floor, where a difference-relative ratio is noise
        out[k] = num / scale if scale > 0 else 0.0
    return out
