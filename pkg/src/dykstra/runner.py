"""Execute an experiment configuration and write its artifacts.

A run produces three files in its output directory: ``trace.jsonl`` (one
record per iterate), ``series.csv`` (derived series) and ``report.json``
(every check, witness search and rate query).  Nothing time- or
path-dependent goes into the artifacts, so repeated runs are
byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .config import validate
from .engine import dykstra_run, map_run, series_csv, trace_records
from .errors import DykstraError, InvalidInputError
from .queries import parse_pos, run_query
from .rates import evaluate, rate_Omega, rate_Phi
from .sets import _vec, family_from_dict

OUTPUT_ENV = "DYKSTRA_OUTPUT_ROOT"
DEFAULT_ROOT = "dykstra-out"


def output_root(override=None):
    return Path(override or os.environ.get(OUTPUT_ENV) or DEFAULT_ROOT)


@dataclass
class RunResult:
    name: str
    report: dict
    exit_code: int
    files: dict = field(default_factory=dict)
    trace: object = None


def build_trace(cfg):
    fam = family_from_dict(cfg["family"])
    x0 = _vec(cfg["x0"])
    if cfg.get("algorithm", "dykstra") == "map":
        trace = map_run(fam, x0, cfg["steps"], order=cfg.get("map_order", "cyclic"))
    else:
        trace = dykstra_run(fam, x0, cfg["steps"])
    if fam.witness is not None:
        trace = trace.attach(fam.witness, cfg.get("bound"))
    return trace


def _need_witness(trace, name):
    if trace.witness is None:
        raise InvalidInputError(f"check {name!r} needs a witness p in the family")


def _main_identity(trace, spec, seed):
    rng = np.random.default_rng(seed)
    T = trace.steps
    centre = trace.witness if trace.witness is not None else trace.x0
    scale = float(np.linalg.norm(trace.x0 - centre)) + 1.0
    worst = None
    for _ in range(spec.get("triples", 50)):
        n, i = sorted(int(v) for v in rng.integers(0, T + 1, size=2))
        z = centre + scale * rng.standard_normal(trace.xs.shape[1])
        rep = dg.check_main_identity(trace, z, n, i, tol=spec.get("tol", dg.TOL_MAIN))
        # compare on the residual-to-tolerance ratio; tolerances differ per z
        if worst is None or rep.residual / rep.tolerance > worst.residual / worst.tolerance:
            worst = rep
    worst.params["triples"] = spec.get("triples", 50)
    worst.params["seed"] = seed
    return worst


def _limit(trace, spec):
    target = np.asarray(_vec(spec["target"]))
    tol = spec.get("tol", 1e-6)
    start = spec.get("from", trace.steps)
    d = np.linalg.norm(trace.xs - target, axis=1)
    if start > trace.steps:
        raise InvalidInputError(f"limit check starts at {start}, past the trace end {trace.steps}")
    bad = np.nonzero(d > tol)[0]
    first = int(bad[-1] + 1) if bad.size else 0
    worst = start + int(np.argmax(d[start:]))
    return dg.CheckReport(
        "limit",
        float(d[worst]),
        tol,
        worst,
        params={"from": start, "target": list(map(float, target)), "tol": tol},
        details={"final_distance": float(d[-1]), "first_index_within_tol": first if first <= trace.steps else None},
    )


def _map_agreement(trace, spec):
    if trace.algorithm != "dykstra":
        return dg.CheckReport("map_agreement", 0.0, spec.get("tol", 1e-9), applicable=False)
    m = trace.m
    sweeps = trace.steps // m
    mp = map_run(trace.family, trace.x0, sweeps, order="cyclic")
    d = np.linalg.norm(trace.xs[: sweeps * m + 1 : m] - mp.xs, axis=1)
    worst = int(np.argmax(d))
    return dg.CheckReport(
        "map_agreement",
        float(d[worst]),
        spec.get("tol", 1e-9),
        worst,
        params={"sweeps": sweeps, "tol": spec.get("tol", 1e-9)},
    )


def _rate_bound(spec, trace, kind, eps, f=None, N=0):
    b = spec.get("bound")
    if b is None:
        return None
    if b != "auto":
        return b
    if trace.bound is None:
        return None
    if kind == "liminf":
        res = evaluate("Phi", rate_Phi, dict(b=trace.bound, m=trace.m, eps=eps, N=N))
    else:
        if eps > 1:
            return None
        res = evaluate("Omega", rate_Omega, dict(b=trace.bound, m=trace.m, eps=eps, f=f))
    return "capped" if res.capped else int(res.value)


def run_check(trace, spec, seed=0):
    """Run one configured check and return its report."""
    name = spec["name"]
    tol = spec.get("tol")
    kw = {} if tol is None else {"tol": tol}
    if name == "identities":
        return dg.check_identities(trace, **kw)
    if name == "inner_products":
        return dg.check_inner_products(trace, spec.get("samples", 1000), seed, **kw)
    if name == "main_identity":
        return _main_identity(trace, spec, seed)
    if name == "summability":
        _need_witness(trace, name)
        return dg.check_summability(trace, trace.witness, trace.bound, **kw)
    if name == "q_bound":
        return dg.check_q_bound(trace, **kw)
    if name == "koh_lemmas":
        _need_witness(trace, name)
        return dg.check_koh_lemmas(trace.family, trace.bound, spec.get("trials", 1000), seed,
                                   float(parse_pos(spec.get("eps", "1/2"), "eps")), **kw)
    if name == "limit":
        return _limit(trace, spec)
    if name == "map_agreement":
        return _map_agreement(trace, spec)
    if name == "finitization":
        return dg.certify_limit(trace, float(parse_pos(spec["eps"], "eps")), _vec(spec["target"]))
    eps = parse_pos(spec["eps"], "eps")
    if name == "liminf":
        N = spec.get("N", 0)
        return dg.find_liminf_witness(trace, eps, N, _rate_bound(spec, trace, "liminf", eps, N=N))
    if name == "metastability":
        bound = _rate_bound(spec, trace, "omega", eps, f=str(spec["f"]))
        return dg.find_metastability_witness(trace, eps, str(spec["f"]), bound)
    if name == "asymptotic_regularity":
        return dg.check_asymptotic_regularity(trace, eps, str(spec["f"]), spec.get("bound"), spec.get("step_bound"))
    raise InvalidInputError(f"unknown check {name!r}")


def _error_entry(spec, e):
    return {"check": spec.get("name"), "status": "error", "error": str(e), "passed": False}


def execute(cfg):
    """Run a validated config; returns ``(report, trace)``."""
    trace = build_trace(cfg)
    seed = cfg.get("seed", 0)
    checks, failed = [], 0
    for spec in cfg.get("checks", []):
        try:
            rep = run_check(trace, spec, seed)
        except DykstraError as e:
            checks.append(_error_entry(spec, e))
            failed += 1
            continue
        failed += int(rep.failed)
        checks.append(rep.to_dict())
    rates = []
    for q in cfg.get("rates", []):
        try:
            res = run_query(q["name"], q["params"])
        except DykstraError as e:
            rates.append({"rate": q["name"], "status": "error", "error": str(e)})
            failed += 1
            continue
        d = res.to_dict()
        if q.get("label"):
            d["label"] = q["label"]
        rates.append(d)
    report = {
        "scenario": cfg["name"],
        "algorithm": trace.algorithm,
        "steps": trace.steps,
        "m": trace.m,
        "dim": trace.family.dim,
        "bound": trace.bound,
        "final_iterate": [float(v) for v in trace.xs[-1]],
        "checks": checks,
        "rates": rates,
        "summary": {"failed": failed, "checks": len(checks), "rates": len(rates)},
        "config": cfg,
    }
    return report, trace


def report_json(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def run(cfg, out_root=None, write=True):
    """Validate, execute and (optionally) write the artifacts of ``cfg``."""
    cfg = validate(cfg)
    report, trace = execute(cfg)
    code = 1 if report["summary"]["failed"] else 0
    files = {}
    if write:
        out = cfg.get("output", {})
        d = output_root(out_root) / out.get("dir", cfg["name"])
        d.mkdir(parents=True, exist_ok=True)
        if out.get("trace", True):
            files["trace"] = d / "trace.jsonl"
            files["trace"].write_text(trace_records(trace), encoding="utf-8")
        if out.get("series", True):
            files["series"] = d / "series.csv"
            files["series"].write_text(series_csv(trace), encoding="utf-8")
        if out.get("report", True):
            files["report"] = d / "report.json"
            files["report"].write_text(report_json(report), encoding="utf-8")
    return RunResult(cfg["name"], report, code, files, trace)
