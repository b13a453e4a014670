"""Command line entry point: zlab simulate | iterate | verify <name> | report."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--dim", type=int)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.add_argument("--box", type=float)
    p.add_argument("--T", dest="T", type=float)
    p.add_argument("--nodes", type=int)
    p.add_argument("--bands", type=lambda s: [int(b) for b in s.split(",")],
                   help="comma separated dyadic bands")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--out", help="output directory for summary.json and CSV tables")
    p.add_argument("--no-timing", dest="no_timing", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zlab",
        description="pseudo-spectral estimate laboratory for the reduced "
                    "Schrodinger / half-wave system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="free flows of seeded data, mass/energy audit")
    _add_common(p_sim)

    p_it = sub.add_parser("iterate", help="run the Picard iteration and report norms")
    _add_common(p_it)
    p_it.add_argument("--s", type=float)
    p_it.add_argument("--l", type=float)
    p_it.add_argument("--iterates", type=int)
    p_it.add_argument("--amplitude", type=float)
    p_it.add_argument("--data-band", dest="data_band", type=float)

    p_ver = sub.add_parser("verify", help="run a named verification")
    p_ver.add_argument("name", help="verification name (see --list)")
    _add_common(p_ver)
    p_ver.add_argument("--target", help="target verification for determinism")
    p_ver.add_argument("--list", action="store_true", help="list verification names")

    p_rep = sub.add_parser("report", help="print a digest of an output directory")
    p_rep.add_argument("--out", required=True)
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict:
    keys = ("dim", "grid_n", "box", "T", "nodes", "bands", "samples", "seed",
            "kappa", "eps", "out", "no_timing", "target", "s", "l", "iterates",
            "amplitude", "data_band")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _emit(result, cfg) -> None:
    from .harness import document_from_result, emit_reports
    out = cfg.get("out")
    if out:
        doc = document_from_result(result, cfg, with_timing=not cfg.get("no_timing", False))
        for path in emit_reports(doc, out):
            print(f"wrote {path}")


def cmd_verify(args: argparse.Namespace) -> int:
    from .harness import REGISTRY, parse_config, run_verification
    if getattr(args, "list", False):
        for name in sorted(REGISTRY):
            print(name)
        return EXIT_OK
    cfg = parse_config(args.config, _collect_overrides(args))
    result = run_verification(args.name, cfg)
    for check in result.checks:
        print(f"[{'PASS' if check.passed else 'FAIL'}] {result.name}: {check.label} "
              f"= {check.value:.6g} (required {check.bound})")
    _emit(result, cfg)
    print(f"{result.name}: {'PASS' if result.passed else 'FAIL'} "
          f"({result.elapsed:.1f} s)")
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def cmd_simulate(args: argparse.Namespace) -> int:
    from .ensembles import EnsembleSpec, SupportSpec, sample_field
    from .grid import make_grid
    from .harness import ReportDocument, config_warnings, emit_reports, parse_config
    from .propagators import free_trajectory

    cfg = parse_config(args.config, _collect_overrides(args))
    for w in config_warnings(cfg):
        print(f"warning: {w}")
    grid = make_grid(cfg.get("dim", 2), cfg.get("box", 2 * np.pi), cfg.get("grid_n", 64))
    seed = cfg.get("seed", 0)
    T, M = cfg.get("T", 1.0), cfg.get("nodes", 32)
    E0 = sample_field(grid, EnsembleSpec(1, seed, SupportSpec("ball", 4.0)), 0)
    traj = free_trajectory("schrodinger", E0, T, M)
    masses = [s.l2() for s in traj.snapshots]
    drift = max(abs(m / masses[0] - 1) for m in masses)
    print(f"simulate: dim={grid.dim} N={grid.points_per_axis} T={T} nodes={M} "
          f"mass drift={drift:.3e}")
    if cfg.get("out"):
        doc = ReportDocument(
            config=cfg,
            summary={"name": "simulate", "pass": bool(drift < 1e-12), "mass_drift": drift},
            tables={"mass": (["t", "l2"], [[t, m] for t, m in zip(traj.times, masses)])},
            plotdata={},
            timing=None,
        )
        emit_reports(doc, cfg["out"])
    return EXIT_OK if drift < 1e-12 else EXIT_CHECK_FAILED


def cmd_iterate(args: argparse.Namespace) -> int:
    from .bands import AngularPartition, DyadicLadder
    from .grid import make_grid
    from .harness import ReportDocument, config_warnings, emit_reports, parse_config
    from .norms import IterationNormFamily
    from .picard import IterationConfig, random_zakharov_data, run_iteration

    cfg = parse_config(args.config, _collect_overrides(args))
    for w in config_warnings(cfg):
        print(f"warning: {w}")
    dim = cfg.get("dim", 2)
    grid = make_grid(dim, cfg.get("box", 2 * np.pi), cfg.get("grid_n", 64))
    s = cfg.get("s", 0.0 if dim == 2 else 0.1)
    l = cfg.get("l", -0.5 if dim == 2 else s - 0.5)
    fam = IterationNormFamily(
        dim=dim, s=s, l=l,
        ladder=DyadicLadder.for_grid(grid),
        partition=AngularPartition.build(dim, cfg.get("kappa", 2.0)),
    )
    data = random_zakharov_data(
        grid, cfg.get("data_band", 1.5), cfg.get("amplitude", 0.1), cfg.get("seed", 0)
    )
    config = IterationConfig(
        family=fam, grid=grid, horizon=cfg.get("T", 1.0),
        iterate_count=cfg.get("iterates", 6), time_nodes=cfg.get("nodes", 32),
        seed=cfg.get("seed", 0),
    )
    report = run_iteration(data, config)
    ratios = report.contraction_ratios
    print(f"iterate: status={report.status}")
    for k in sorted(report.R):
        line = f"  R_{k} = {report.R[k]:.6e}"
        if k in ratios:
            line += f"   R_{k+1}/R_{k} = {ratios[k]:.4f}"
        print(line)
    if cfg.get("out"):
        doc = ReportDocument(
            config=cfg,
            summary={
                "name": "iterate",
                "pass": report.status == "ok",
                "status": report.status,
                "ratios": {str(k): v for k, v in ratios.items()},
            },
            tables={
                "norms": (
                    ["k", "x_E", "s2_re_v", "n1_product", "mass_drift"],
                    [[k, report.x_E[k], report.s2_re_v[k], report.n1_product[k],
                      report.mass_drift[k]] for k in range(len(report.x_E))],
                ),
                "R": (["k", "R_k"], [[k, report.R[k]] for k in sorted(report.R)]),
            },
            plotdata={},
            timing=None,
        )
        emit_reports(doc, cfg["out"])
    if report.status != "ok":
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    from .harness import read_summary
    path = os.path.join(args.out, "summary.json")
    if not os.path.exists(path):
        print(f"no summary.json under {args.out}", file=sys.stderr)
        return EXIT_USAGE
    summary = read_summary(args.out)
    print(json.dumps(summary.get("summary", summary), indent=2, sort_keys=True))
    for name in sorted(os.listdir(args.out)):
        if name.endswith(".csv"):
            print(f"table: {os.path.join(args.out, name)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "iterate":
            return cmd_iterate(args)
        if args.command == "report":
            return cmd_report(args)
        parser.error(f"unknown command {args.command}")
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
