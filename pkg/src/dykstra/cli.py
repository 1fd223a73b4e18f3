"""Command line entry point.

Subcommands::

    dykstra run <config.json | builtin-name> [--out DIR]
    dykstra rates <name> --param value ...
    dykstra verify <trace.jsonl> <config.json | builtin-name>
    dykstra report <dir>
    dykstra scenarios [--dump NAME]

``run`` and ``verify`` exit with status 1 when a check that is not capped
fails; malformed arguments exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as cfgmod
from .engine import read_trace_jsonl
from .errors import ConfigError, DykstraError
from .queries import QUERIES, parse_nonneg, result_lines, run_query
from .runner import OUTPUT_ENV, run, run_check
from .scenarios import BUILTIN, builtin
from .sets import family_from_dict


def _load_config(arg):
    if arg in BUILTIN and not Path(arg).exists():
        return builtin(arg)
    return cfgmod.load(arg)


def _rational(text):
    try:
        parse_nonneg(text)
    except DykstraError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return text


def _fmt_entry(e):
    name = e.get("check", "?")
    status = e.get("status", "?")
    if "error" in e:
        return f"{name:<24} {status:<14} {e['error']}"
    if "witness" in e:
        return (
            f"{name:<24} {status:<14} witness={e['witness']} bound={e.get('bound')} "
            f"eps={e['eps']:.6g} verified={e.get('verified')}"
        )
    return f"{name:<24} {status:<14} residual={e['residual']} tolerance={e['tolerance']:.3g}"


def render(report):
    """Human-readable table for a run report."""
    lines = [
        f"scenario {report['scenario']}: {report['algorithm']}, {report['steps']} steps, "
        f"m={report['m']}, dim={report['dim']}, b={report['bound']}"
    ]
    lines += ["  " + _fmt_entry(e) for e in report["checks"]]
    for r in report["rates"]:
        if "error" in r:
            lines.append(f"  rate {r['rate']:<19} error          {r['error']}")
        else:
            lines.append(f"  rate {r['rate']:<19} {r['value']}")
    s = report["summary"]
    lines.append(f"failed: {s['failed']}")
    return "\n".join(lines)


def cmd_run(args):
    res = run(_load_config(args.config), out_root=args.out)
    if not args.quiet:
        print(render(res.report))
        for k, p in sorted(res.files.items()):
            print(f"{k}: {p}")
    return res.exit_code


def cmd_verify(args):
    cfg = cfgmod.validate(_load_config(args.config))
    fam = family_from_dict(cfg["family"])
    trace = read_trace_jsonl(args.trace, fam, cfg.get("algorithm", "dykstra"))
    if fam.witness is not None:
        trace = trace.attach(fam.witness, cfg.get("bound"))
    entries, failed = [], 0
    for spec in cfg.get("checks", []):
        try:
            rep = run_check(trace, spec, cfg.get("seed", 0))
        except DykstraError as e:
            entries.append({"check": spec["name"], "status": "error", "error": str(e)})
            failed += 1
            continue
        failed += int(rep.failed)
        entries.append(rep.to_dict())
    for e in entries:
        print(_fmt_entry(e))
    print(f"failed: {failed}")
    return 1 if failed else 0


def cmd_report(args):
    path = Path(args.dir)
    if path.is_dir():
        path = path / "report.json"
    report = json.loads(path.read_text(encoding="utf-8"))
    print(render(report))
    return 1 if report["summary"]["failed"] else 0


def cmd_rates(args):
    _, spec, _ = QUERIES[args.rate]
    raw = {p: getattr(args, p) for p, _ in spec if getattr(args, p, None) is not None}
    res = run_query(args.rate, raw)
    if args.json:
        print(json.dumps(res.to_dict(), sort_keys=True, ensure_ascii=False))
    else:
        print("\n".join(result_lines(res)))
    return 0


def cmd_scenarios(args):
    if args.dump:
        print(json.dumps(builtin(args.dump), indent=2, sort_keys=True))
    else:
        for name, fn in BUILTIN.items():
            print(f"{name:<10} {fn()['description']}")
    return 0


_KINDS_WITH_RATIONAL = {"nat", "pos", "nonneg"}


def build_parser():
    p = argparse.ArgumentParser(prog="dykstra", description="Dykstra's algorithm: runs, diagnostics and rates.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a config file or built-in scenario")
    r.add_argument("config")
    r.add_argument("--out", help=f"output root (default ${OUTPUT_ENV} or ./dykstra-out)")
    r.add_argument("--quiet", action="store_true")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="re-run a config's checks on a saved trace")
    v.add_argument("trace")
    v.add_argument("config")
    v.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", help="render a saved report")
    rep.add_argument("dir")
    rep.set_defaults(func=cmd_report)

    sc = sub.add_parser("scenarios", help="list built-in scenarios")
    sc.add_argument("--dump", metavar="NAME", help="print the config of a built-in scenario")
    sc.set_defaults(func=cmd_scenarios)

    ra = sub.add_parser("rates", help="evaluate a rate function exactly")
    rsub = ra.add_subparsers(dest="rate", required=True)
    for name, (_, spec, help_) in QUERIES.items():
        q = rsub.add_parser(name, help=help_)
        for param, kind in spec:
            q.add_argument(f"--{param}", required=True, type=_rational if kind in _KINDS_WITH_RATIONAL else str)
        q.add_argument("--json", action="store_true", help="print the result as JSON")
        q.set_defaults(func=cmd_rates)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DykstraError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
