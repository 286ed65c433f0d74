"""Command-line interface: ``python -m aggfield <command> ...``.

Commands
--------
simulate CONFIG   Monte Carlo covariance experiment (JSON or CSV report)
theory CONFIG     regime constants and limit covariances at the configured pairs
table CONFIG      exact-covariance convergence table (``--monte-carlo`` to simulate instead)
validate          run the validation suite; exit status 1 on any failure
report PATH       re-emit a saved JSON report as JSON or CSV

Global flags (accepted before or after the command): ``--seed``,
``--workers`` (alias ``--threads``), ``--profile`` (tolerance profile) and
``--output`` (file to write; format from ``--format`` or the suffix).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import AggFieldError
from .experiments import config as cfg
from .experiments import report as rp
from .experiments import runner, validation
from . import regimes


def _global_flags(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(None),
                        help="master seed (overrides the config)")
    parser.add_argument("--workers", "--threads", dest="workers", type=int, default=default(1),
                        help="worker processes; results do not depend on it")
    parser.add_argument("--profile", choices=sorted(validation.PROFILES),
                        default=default("default"), help="tolerance profile")
    parser.add_argument("--output", "-o", default=default(None),
                        help="output file (stdout if omitted)")


def _format_flag(parser):
    parser.add_argument("--format", choices=("json", "csv"), default=None,
                        help="report format (default: from --output suffix, else json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aggfield", description=__doc__.split("\n\n")[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo covariance experiment")
    p.add_argument("config")
    p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    p.add_argument("--no-exact", action="store_true", help="skip the exact finite-n column")
    _format_flag(p)
    _global_flags(p, suppress=True)

    p = sub.add_parser("theory", help="limit constants and covariances")
    p.add_argument("config")
    _global_flags(p, suppress=True)

    p = sub.add_parser("table", help="convergence table")
    p.add_argument("config")
    p.add_argument("--monte-carlo", action="store_true",
                   help="use Monte Carlo estimates instead of exact covariances")
    p.add_argument("--timing", action="store_true")
    _format_flag(p)
    _global_flags(p, suppress=True)

    p = sub.add_parser("validate", help="run the validation suite")
    p.add_argument("--only", nargs="*", default=None, help="names of checks to run")
    _global_flags(p, suppress=True)

    p = sub.add_parser("report", help="re-emit a saved JSON report")
    p.add_argument("path")
    _format_flag(p)
    _global_flags(p, suppress=True)
    return parser


def _load(args):
    config = cfg.load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    scale = validation.PROFILES[args.profile]
    if scale != 1.0:
        d = config.to_dict()
        for key in ("exact_rtol", "cov_G_rtol"):
            d["tolerances"][key] = d["tolerances"][key] * scale
        config = cfg.config_from_dict(d)
    return config


def _write(text, args):
    if args.output is None:
        sys.stdout.write(text)
    else:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise rp.ReportError(f"cannot write {args.output}: {exc}") from None


def _emit(report, args):
    fmt = args.format
    if fmt is None:
        fmt = "csv" if (args.output or "").endswith(".csv") else "json"
    _write(rp.to_csv(report) if fmt == "csv" else rp.to_json(report), args)


def _theory(args):
    config = _load(args)
    spec = config.spec
    consts = regimes.regime_constants(spec)
    pairs = []
    for s, t in config.pairs:
        entry = {"s": list(s), "t": list(t), "stated": regimes.stated_limit_cov(spec, s, t)}
        entry["effective"] = (entry["stated"] if spec.kind == "critical"
                              else regimes.limit_cov(spec, s, t))
        pairs.append(entry)
    doc = {"regime": spec.to_dict(), "H": [consts.H1, consts.H2], "sigma2": consts.sigma2,
           "pairs": pairs}
    _write(json.dumps(rp._clean(doc), indent=2, sort_keys=True) + "\n", args)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            report = runner.run_mc_experiment(_load(args), workers=args.workers,
                                              timing=args.timing, exact=not args.no_exact)
            _emit(report, args)
        elif args.command == "theory":
            return _theory(args)
        elif args.command == "table":
            report = runner.run_convergence_table(_load(args), use_exact=not args.monte_carlo,
                                                  workers=args.workers, timing=args.timing)
            _emit(report, args)
        elif args.command == "validate":
            result = validation.run_validation_suite(args.profile, only=args.only)
            text = "\n".join(result.lines()) + "\n"
            text += f"{len(result.results) - len(result.failures())}/{len(result.results)} checks passed\n"
            _write(text, args)
            return 0 if result.passed else 1
        elif args.command == "report":
            loaded = rp.load_report(args.path, "json")
            _emit(loaded, args)
    except AggFieldError as exc:
        print(f"aggfield: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
