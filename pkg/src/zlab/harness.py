"""Configuration parsing, report documents, and deterministic emission.

Config files are JSON objects with a flat, schema-checked key set; command
line flags override file values.  Reports are a summary.json plus one CSV
per table; identical config and seed produce byte-identical summaries when
timing is excluded.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .verifications import REGISTRY, VerificationResult, run_verification, _register

CONFIG_SCHEMA: Dict[str, type] = {
    "command": str,
    "name": str,
    "dim": int,
    "grid_n": int,
    "box": float,
    "T": float,
    "nodes": int,
    "bands": list,
    "samples": int,
    "seed": int,
    "kappa": float,
    "eps": float,
    "out": str,
    "no_timing": bool,
    "target": str,
    "s": float,
    "l": float,
    "iterates": int,
    "amplitude": float,
    "data_band": float,
}

_NUMERIC = (int, float)


def _coerce(key: str, value):
    want = CONFIG_SCHEMA[key]
    if want is float and isinstance(value, _NUMERIC) and not isinstance(value, bool):
        return float(value)
    if want is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if want is list and isinstance(value, list) and all(
        isinstance(v, _NUMERIC) and not isinstance(v, bool) for v in value
    ):
        return [int(v) if float(v).is_integer() else float(v) for v in value]
    if isinstance(value, want):
        return value
    raise ValueError(f"config key '{key}': expected {want.__name__}, got {value!r}")


def validate_config(raw: Dict) -> Dict:
    out = {}
    for key, value in raw.items():
        if key not in CONFIG_SCHEMA:
            raise ValueError(f"unknown config key '{key}'")
        out[key] = _coerce(key, value)
    return out


def config_warnings(cfg: Dict) -> List[str]:
    warns = []
    if cfg.get("dim", 2) == 2 and cfg.get("s") not in (None, 0, 0.0):
        warns.append("off-regime: d=2 with s != 0")
    if cfg.get("dim") == 3 and cfg.get("s") is not None and cfg["s"] <= 0:
        warns.append("off-regime: d=3 with s <= 0")
    return warns


def parse_config(path: Optional[str] = None, overrides: Optional[Dict] = None) -> Dict:
    """Load and validate a JSON config file; flag overrides win."""
    cfg: Dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"config file {path}: invalid JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path}: top level must be an object")
        cfg.update(validate_config(raw))
    if overrides:
        cfg.update(validate_config({k: v for k, v in overrides.items() if v is not None}))
    return cfg


def config_hash(cfg: Dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass
class ReportDocument:
    config: Dict
    summary: Dict
    tables: Dict[str, Tuple[List[str], List[List[float]]]]
    plotdata: Dict[str, Tuple[List[float], List[float]]]
    timing: Optional[Dict] = None

    @property
    def input_hash(self) -> str:
        return config_hash(self.config)


def document_from_result(result: VerificationResult, cfg: Dict,
                         with_timing: bool = True) -> ReportDocument:
    timing = {"elapsed_seconds": result.elapsed} if with_timing else None
    return ReportDocument(
        config=dict(cfg),
        summary=result.summary_dict(),
        tables=dict(result.tables),
        plotdata=dict(result.plotdata),
        timing=timing,
    )


def render_summary_bytes(doc: ReportDocument) -> bytes:
    payload = {
        "config": doc.config,
        "input_hash": doc.input_hash,
        "summary": doc.summary,
    }
    if doc.timing is not None:
        payload["timing"] = doc.timing
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _format_cell(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_report_")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_reports(doc: ReportDocument, out_dir: str) -> List[str]:
    """Write summary.json, per-table CSVs, and plot data; returns the paths."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        summary_path = os.path.join(out_dir, "summary.json")
        _atomic_write(summary_path, render_summary_bytes(doc))
        paths.append(summary_path)
        for name, (header, rows) in doc.tables.items():
            body = ",".join(header) + "\n"
            for row in rows:
                body += ",".join(_format_cell(c) for c in row) + "\n"
            path = os.path.join(out_dir, f"table_{name}.csv")
            _atomic_write(path, body.encode("utf-8"))
            paths.append(path)
        for name, (xs, ys) in doc.plotdata.items():
            body = "x,y\n" + "".join(
                f"{_format_cell(float(x))},{_format_cell(float(y))}\n"
                for x, y in zip(xs, ys)
            )
            path = os.path.join(out_dir, f"plotdata_{name}.csv")
            _atomic_write(path, body.encode("utf-8"))
            paths.append(path)
        return paths
    except OSError as exc:
        raise OSError(f"failed writing reports under {out_dir}: {exc}") from exc


def read_summary(out_dir: str) -> Dict:
    with open(os.path.join(out_dir, "summary.json"), "r", encoding="utf-8") as fh:
        return json.load(fh)


@_register("determinism")
def run_determinism(cfg: Dict) -> VerificationResult:
    """Re-run a target verification and compare summaries byte for byte."""
    target = cfg.get("target", "lp-reconstruction")
    if target == "determinism":
        raise ValueError("determinism cannot target itself")
    sub_cfg = {
        k: v for k, v in cfg.items() if k not in ("target", "out", "no_timing", "name", "command")
    }
    if target == "lp-reconstruction" and "samples" not in sub_cfg:
        sub_cfg.update({"grid_n": 64, "samples": 8})
    blobs = []
    for _ in range(2):
        r = run_verification(target, sub_cfg)
        doc = document_from_result(r, sub_cfg, with_timing=False)
        blobs.append(render_summary_bytes(doc))
    res = VerificationResult("determinism")
    res.require(
        f"byte-identical re-run of {target} (1 = identical)",
        1.0 if blobs[0] == blobs[1] else 0.0,
        lo=1.0,
    )
    return res
