"""Named end-to-end verifications with pinned parameters and tolerances.

Each entry runs one self-contained study and returns a result whose checks
all carry machine-readable pass/fail verdicts.  The CLI exposes them as
``zlab verify <name>`` and the acceptance test suite runs them directly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .bands import AngularPartition, DyadicLadder, project_angular, project_dyadic, project_low
from .ensembles import EnsembleSpec, SupportSpec, sample_field
from .grid import Field, Grid, make_grid, plane_wave
from .norms import IterationNormFamily
from .picard import (
    IterationConfig,
    ZakharovData,
    lipschitz_probe,
    random_zakharov_data,
    run_iteration,
    tune_horizon,
)
from .propagators import (
    SourceTerm,
    duhamel,
    free_trajectory,
    half_wave_flow,
    schrodinger_flow,
    wave_energy,
    wave_flow,
)
from .verifier import (
    check_bernstein,
    check_bilinear_inhomogeneous,
    check_dispersive_decay,
    check_divcurl,
    check_flux_identities,
    check_refined_strichartz,
    bilinear_slope_study,
    decay_default_samples,
)


@dataclass
class CheckLine:
    label: str
    passed: bool
    value: float
    bound: str


@dataclass
class VerificationResult:
    name: str
    checks: List[CheckLine] = dataclass_field(default_factory=list)
    tables: Dict[str, Tuple[List[str], List[List[float]]]] = dataclass_field(default_factory=dict)
    plotdata: Dict[str, Tuple[List[float], List[float]]] = dataclass_field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def require(self, label: str, value: float, lo: float = -math.inf, hi: float = math.inf):
        ok = bool(lo <= value <= hi) and math.isfinite(value)
        if lo == -math.inf:
            bound = f"<= {hi:g}"
        elif hi == math.inf:
            bound = f">= {lo:g}"
        else:
            bound = f"in [{lo:g}, {hi:g}]"
        self.checks.append(CheckLine(label, ok, float(value), bound))
        return ok

    def summary_dict(self) -> Dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "checks": [
                {"label": c.label, "pass": c.passed, "value": c.value, "bound": c.bound}
                for c in self.checks
            ],
        }


Runner = Callable[[Dict], VerificationResult]
REGISTRY: Dict[str, Runner] = {}


def _register(name: str):
    def deco(fn: Runner) -> Runner:
        REGISTRY[name] = fn
        return fn
    return deco


def _family(grid: Grid, s: float, l: float, kappa: float = 2.0,
            angular_s1_3d: bool = False) -> IterationNormFamily:
    return IterationNormFamily(
        dim=grid.dim,
        s=s,
        l=l,
        ladder=DyadicLadder.for_grid(grid),
        partition=AngularPartition.build(grid.dim, kappa),
        angular_s1_3d=angular_s1_3d,
    )


# ---------------------------------------------------------------------------


@_register("lp-reconstruction")
def run_lp_reconstruction(cfg: Dict) -> VerificationResult:
    """Dyadic plus angular reconstruction on random band-limited fields."""
    res = VerificationResult("lp-reconstruction")
    n = int(cfg.get("grid_n", 256))
    grid = make_grid(int(cfg.get("dim", 2)), cfg.get("box", 2 * np.pi), n)
    ladder = DyadicLadder.for_grid(grid)
    partition = AngularPartition.build(grid.dim, cfg.get("kappa", 2.0))
    count = int(cfg.get("samples", 64))
    seed = int(cfg.get("seed", 7))
    spec = EnsembleSpec(count, seed, SupportSpec("ball", ladder.max_band, exclude_zero=False))
    worst_recon = 0.0
    worst_ang = 0.0
    for i in range(count):
        u = sample_field(grid, spec, i)
        total = project_low(u, 1, ladder)
        for lam in ladder.bands:
            total = total + project_dyadic(u, lam, ladder)
        worst_recon = max(worst_recon, (u - total).l2() / u.l2())
        for lam in ladder.bands:
            piece = project_dyadic(u, lam, ladder)
            if piece.l2() == 0:
                continue
            ang = None
            for p in range(partition.patch_count):
                q = project_angular(u, lam, p, partition, ladder)
                ang = q if ang is None else ang + q
            worst_ang = max(worst_ang, (piece - ang).l2() / piece.l2())
    res.require("reconstruction relative error", worst_recon, hi=1e-12)
    res.require("angular resum relative error", worst_ang, hi=1e-12)
    res.tables["reconstruction"] = (
        ["samples", "max_recon_err", "max_angular_err"],
        [[count, worst_recon, worst_ang]],
    )
    return res


@_register("propagators")
def run_propagators(cfg: Dict) -> VerificationResult:
    """Isometry, energy conservation, reversibility, quadrature order."""
    res = VerificationResult("propagators")
    grid = make_grid(2, 2 * np.pi, int(cfg.get("grid_n", 64)))
    seed = int(cfg.get("seed", 7))
    u = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 8.0)), 0)
    base = u.l2()
    dev = 0.0
    for t in (0.37, 1.9):
        dev = max(dev, abs(schrodinger_flow(u, t).l2() / base - 1))
        dev = max(dev, abs(half_wave_flow(u, t).l2() / base - 1))
    res.require("semigroup L2 isometry deviation", dev, hi=1e-12)

    back = schrodinger_flow(schrodinger_flow(u, 0.83), -0.83)
    res.require("time reversal error", (back - u).l2() / base, hi=1e-12)

    n0 = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 6.0), real=True), 1)
    n1 = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 6.0), real=True), 2)
    e0 = wave_energy(*wave_flow(n0, n1, 0.0))
    drift = max(
        abs(wave_energy(*wave_flow(n0, n1, t)) / e0 - 1)
        for t in np.linspace(0.0, 5.0, 32)
    )
    res.require("wave energy relative drift", drift, hi=1e-10)

    E0 = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 4.0)), 3)
    F0 = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 4.0)), 4)
    T = 0.8
    def solve(M):
        times = np.linspace(0, T, M + 1)
        src = SourceTerm([F0 * float(np.sin(3.0 * t / T)) for t in times], "smooth")
        return duhamel("schrodinger", E0, src, T, M)
    ref = solve(512).snapshots[-1]
    errs = [(solve(M).snapshots[-1] - ref).l2() for M in (32, 64)]
    order = math.log2(errs[0] / errs[1])
    res.require("duhamel convergence order", order, lo=1.7, hi=2.3)
    res.tables["propagators"] = (
        ["isometry_dev", "reversal_err", "energy_drift", "duhamel_order"],
        [[dev, (back - u).l2() / base, drift, order]],
    )
    return res


@_register("dispersive-decay")
def run_dispersive_decay(cfg: Dict) -> VerificationResult:
    """Kernel decay exponents for d = 2 and the d = 1 calibration."""
    res = VerificationResult("dispersive-decay")
    lam = float(cfg.get("bands", [1])[0]) if cfg.get("bands") else 1.0
    box = cfg.get("box", 96 * np.pi)
    g2 = make_grid(2, box, int(cfg.get("grid_n", 512)))
    ts, xs = decay_default_samples(g2, lam)
    fit2 = check_dispersive_decay(lam, ts, xs, g2)
    res.require("d=2 decay exponent", fit2.exponent, lo=-2.3, hi=-1.7)
    g1 = make_grid(1, box, 2048)
    ts1, xs1 = decay_default_samples(g1, lam)
    fit1 = check_dispersive_decay(lam, ts1, xs1, g1)
    res.require("d=1 decay exponent", fit1.exponent, lo=-1.2, hi=-0.8)
    res.require("d=2 envelope constant finite", fit2.envelope_constant, lo=0.0, hi=1e6)
    for tag, fit in (("d2", fit2), ("d1", fit1)):
        xs_flat, ys_flat = [], []
        for i, t in enumerate(fit.t_samples):
            for j, x1 in enumerate(fit.x1_samples):
                xs_flat.append(1.0 / fit.band + math.sqrt(t) + abs(x1))
                ys_flat.append(fit.values[i, j])
        res.plotdata[f"decay_{tag}"] = (xs_flat, ys_flat)
        res.tables[f"decay_{tag}"] = (
            ["exponent", "fit_residual", "envelope_constant"],
            [[fit.exponent, fit.fit_residual, fit.envelope_constant]],
        )
    return res


@_register("strichartz")
def run_strichartz(cfg: Dict) -> VerificationResult:
    """Directional Strichartz: band-uniform constants, source variant, d=3."""
    res = VerificationResult("strichartz")
    seed = int(cfg.get("seed", 7))
    samples = int(cfg.get("samples", 32))
    grid = make_grid(2, 2 * np.pi, int(cfg.get("grid_n", 256)))
    bands = cfg.get("bands") or [2, 4, 8, 16, 32]
    hom = check_refined_strichartz(grid, bands, samples, seed, M=int(cfg.get("nodes", 24)))
    res.require("d=2 homogeneous slope", hom.slope, lo=-0.15, hi=0.15)
    c_hom = hom.max_ratio
    inhom = check_refined_strichartz(
        grid, [2, 8, 32], max(8, samples // 4), seed + 1,
        M=int(cfg.get("nodes", 24)), with_source=True,
    )
    res.require("d=2 inhomogeneous over homogeneous constant", inhom.max_ratio / c_hom, hi=4.0)
    g3 = make_grid(3, 2 * np.pi, 32)
    d3 = check_refined_strichartz(
        g3, [2, 4, 8], 16, seed + 2, M=16, eps=float(cfg.get("eps", 0.05))
    )
    per_band = d3.max_ratio_per_scale()
    vals = [per_band[b] for b in sorted(per_band)]
    growth = max(vals) / vals[0]
    res.require("d=3 ratio growth after gain division", growth, hi=2.0)
    for tag, rep in (("d2_hom", hom), ("d2_inhom", inhom), ("d3", d3)):
        per = rep.max_ratio_per_scale()
        res.tables[f"strichartz_{tag}"] = (
            ["band", "max_ratio"],
            [[b, per[b]] for b in sorted(per)],
        )
        res.plotdata[f"strichartz_{tag}"] = (
            sorted(per), [per[b] for b in sorted(per)]
        )
    return res


@_register("divcurl-flux")
def run_divcurl_flux(cfg: Dict) -> VerificationResult:
    """Flux identity residual order and div-curl ratio stability."""
    res = VerificationResult("divcurl-flux")
    seed = int(cfg.get("seed", 7))
    gf = make_grid(2, 2 * np.pi, 64)
    E0 = sample_field(gf, EnsembleSpec(1, seed, SupportSpec("annulus", 2.0)), 0)
    n0 = sample_field(gf, EnsembleSpec(1, seed, SupportSpec("annulus", 2.0), real=True), 1)
    n1 = sample_field(gf, EnsembleSpec(1, seed, SupportSpec("annulus", 2.0), real=True), 2)
    rep = check_flux_identities(gf, E0, n0, n1, T=0.5, M=int(cfg.get("nodes", 64)))
    for name, order in zip(rep.names, rep.orders):
        res.require(f"flux order: {name}", order, lo=1.6, hi=2.4)
    res.tables["flux_orders"] = (
        ["residual_coarse", "residual_fine", "order"],
        [[c, f, o] for c, f, o in zip(rep.residual_coarse, rep.residual_fine, rep.orders)],
    )

    grid = make_grid(2, 2 * np.pi, int(cfg.get("grid_n", 256)))
    pairs = [(2, 16), (2, 32), (4, 32)]
    ratios = {}
    dc = check_divcurl(grid, pairs, int(cfg.get("samples", 32)), seed, M=int(cfg.get("nodes", 24)))
    per = {}
    for (lam, mu) in pairs:
        m = dc.scale == float(mu)
        per[(lam, mu)] = float(np.max(dc.ratio[m & (dc.normalizer > 0)]))
    stab = per[(2, 32)] / per[(2, 16)]
    res.require("div-curl ratio stability under band doubling", stab, lo=0.5, hi=2.0)
    res.require("div-curl max ratio", dc.max_ratio, hi=1.0)
    res.tables["divcurl"] = (
        ["wave_band", "schrodinger_band", "max_ratio"],
        [[lam, mu, per[(lam, mu)]] for (lam, mu) in pairs],
    )
    return res


BILINEAR_WINDOWS = {
    ("high_low", "n"): (-0.65, -0.35),
    ("high_low", "dtn"): (-0.65, -0.35),
    ("high_low", "product"): (-0.65, -0.35),
    ("low_high", "n"): (-0.65, -0.35),
    ("low_high", "dtn"): (0.35, 0.65),
    ("low_high", "product"): (-0.65, -0.35),
}


@_register("bilinear")
def run_bilinear(cfg: Dict) -> VerificationResult:
    """Interaction scaling slopes for both frequency regimes."""
    res = VerificationResult("bilinear")
    seed = int(cfg.get("seed", 7))
    samples = int(cfg.get("samples", 32))
    kappa = float(cfg.get("kappa", 2.0))
    grid = make_grid(2, cfg.get("box", np.pi), int(cfg.get("grid_n", 256)))
    moving = cfg.get("bands") or [16, 32, 64, 128]
    studies = {
        "high_low": bilinear_slope_study(
            "high_low", moving, 2, grid, samples, seed, int(cfg.get("nodes", 24)), kappa
        ),
        "low_high": bilinear_slope_study(
            "low_high", moving, 2, grid, samples, seed + 1, int(cfg.get("nodes", 24)), kappa
        ),
    }
    for case, rows in studies.items():
        for name, rep in rows.items():
            lo, hi = BILINEAR_WINDOWS[(case, name)]
            res.require(f"{case} {name} slope", rep.slope, lo=lo, hi=hi)
            pts = rep.scaling_points()
            res.plotdata[f"bilinear_{case}_{name}"] = (
                [math.exp(u) for u, _ in pts],
                [math.exp(v) for _, v in pts],
            )
            res.tables[f"bilinear_{case}_{name}"] = (
                ["band", "max_ratio"],
                [[b, r] for b, r in rep.max_ratio_per_scale().items()],
            )
    return res


@_register("bilinear-inhomogeneous")
def run_bilinear_inhomogeneous(cfg: Dict) -> VerificationResult:
    """Source-corrected bilinear ratios along a small iteration."""
    res = VerificationResult("bilinear-inhomogeneous")
    seed = int(cfg.get("seed", 7))
    grid = make_grid(2, 2 * np.pi, int(cfg.get("grid_n", 64)))
    fam = _family(grid, 0.0, -0.5)
    lam, mu = 2, 16
    from .verifier import check_bilinear
    hom = check_bilinear("high_low", lam, mu, grid, 8, seed, M=16)
    c_hom = hom.rows["product"].max_ratio
    inhom = check_bilinear_inhomogeneous(
        "high_low", lam, mu, grid, fam, seed=seed, M=16, iterate_count=3
    )
    res.require("inhomogeneous over homogeneous constant", inhom.max_ratio / c_hom, hi=4.0)
    res.tables["bilinear_inhomogeneous"] = (
        ["iterate", "lhs", "rhs", "ratio"],
        [[s, l, r, q] for s, l, r, q in zip(inhom.scale, inhom.lhs, inhom.rhs, inhom.ratio)],
    )
    return res


@_register("picard-contraction")
def run_picard_contraction(cfg: Dict) -> VerificationResult:
    """Contraction ratios, norm boundedness, mass drift, Lipschitz probes."""
    res = VerificationResult("picard-contraction")
    seed = int(cfg.get("seed", 2025))
    grid = make_grid(2, cfg.get("box", 2 * np.pi), int(cfg.get("grid_n", 128)))
    fam = _family(grid, float(cfg.get("s", 0.0)), float(cfg.get("l", -0.5)))
    data = random_zakharov_data(
        grid, float(cfg.get("data_band", 1.5)), float(cfg.get("amplitude", 0.1)), seed
    )
    config = IterationConfig(
        family=fam, grid=grid, horizon=float(cfg.get("T", 2.0)),
        iterate_count=int(cfg.get("iterates", 9)), time_nodes=int(cfg.get("nodes", 64)),
        seed=seed,
    )
    report = tune_horizon(data, config, target=0.5, k_window=(3, 7))
    res.require("iteration completed (1 = ok)", 1.0 if report.status == "ok" else 0.0, lo=1.0)
    ratios = report.contraction_ratios
    window = [ratios[k] for k in range(3, 8) if k in ratios]
    res.require("window coverage (ratios for k = 3..7)", float(len(window)), lo=5.0)
    if window:
        res.require("max contraction ratio k in 3..7", max(window), hi=0.5)
    bound = max(max(report.x_E), max(report.s2_re_v)) / max(report.x_E[0], report.s2_re_v[0])
    res.require("iterate norms bounded over free flow", bound, hi=2.0)
    res.require("converged-solution mass drift", report.mass_drift[-1], hi=1e-6)

    probe_cfg = IterationConfig(
        family=fam, grid=grid, horizon=report.config.horizon,
        iterate_count=5, time_nodes=32, seed=seed,
    )
    probe_ratios = []
    for j in range(8):
        delta = random_zakharov_data(grid, 1.5, 0.005, seed + 100 + j)
        probe_ratios.append(lipschitz_probe(data, delta, probe_cfg))
    res.require("lipschitz probe max ratio", max(probe_ratios), hi=5.0)
    res.tables["picard"] = (
        ["k", "x_E", "s2_re_v", "n1_product", "mass_drift"],
        [
            [k, report.x_E[k], report.s2_re_v[k], report.n1_product[k], report.mass_drift[k]]
            for k in range(len(report.x_E))
        ],
    )
    res.tables["picard_R"] = (
        ["k", "R_k"],
        [[k, report.R[k]] for k in sorted(report.R)],
    )
    res.tables["lipschitz"] = (
        ["probe", "ratio"],
        [[j, r] for j, r in enumerate(probe_ratios)],
    )
    return res


@_register("iteration-3d")
def run_iteration_3d(cfg: Dict) -> VerificationResult:
    """Three-dimensional smoke test of the iteration in the s > 0 regime."""
    res = VerificationResult("iteration-3d")
    seed = int(cfg.get("seed", 2025))
    grid = make_grid(3, cfg.get("box", 2 * np.pi), int(cfg.get("grid_n", 32)))
    fam = _family(grid, float(cfg.get("s", 0.1)), float(cfg.get("l", -0.4)))
    data = random_zakharov_data(grid, 1.5, float(cfg.get("amplitude", 0.1)), seed)
    config = IterationConfig(
        family=fam, grid=grid, horizon=float(cfg.get("T", 1.0)),
        iterate_count=int(cfg.get("iterates", 5)), time_nodes=int(cfg.get("nodes", 32)),
        seed=seed,
    )
    report = run_iteration(data, config)
    res.require("iteration completed (1 = ok)", 1.0 if report.status == "ok" else 0.0, lo=1.0)
    ratios = report.contraction_ratios
    if ratios:
        res.require("max contraction ratio", max(ratios.values()), hi=0.75)
    res.tables["iteration3d"] = (
        ["k", "x_E", "s2_re_v", "mass_drift"],
        [[k, report.x_E[k], report.s2_re_v[k], report.mass_drift[k]]
         for k in range(len(report.x_E))],
    )
    res.tables["iteration3d_R"] = (
        ["k", "R_k"], [[k, report.R[k]] for k in sorted(report.R)],
    )
    return res


@_register("bernstein")
def run_bernstein(cfg: Dict) -> VerificationResult:
    """Band-uniform sup-norm bound with extremal samples."""
    res = VerificationResult("bernstein")
    grid = make_grid(2, 2 * np.pi, int(cfg.get("grid_n", 256)))
    bands = cfg.get("bands") or [2, 4, 8, 16, 32]
    rep = check_bernstein(bands, grid, int(cfg.get("samples", 16)), int(cfg.get("seed", 7)))
    res.require("bernstein slope", rep.slope, lo=-0.15, hi=0.15)
    res.require("bernstein max ratio", rep.max_ratio, hi=10.0)
    per = rep.max_ratio_per_scale()
    res.tables["bernstein"] = (["band", "max_ratio"], [[b, per[b]] for b in sorted(per)])
    res.plotdata["bernstein"] = (sorted(per), [per[b] for b in sorted(per)])
    return res


def run_verification(name: str, cfg: Optional[Dict] = None) -> VerificationResult:
    if name not in REGISTRY:
        raise KeyError(f"unknown verification {name!r}; known: {sorted(REGISTRY)}")
    start = time.perf_counter()
    result = REGISTRY[name](dict(cfg or {}))
    result.elapsed = time.perf_counter() - start
    return result
