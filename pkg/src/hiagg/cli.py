"""Command line interface.

Subcommands:
  validate   parse a fleet, print the data quality audit, gate on threshold
  aggregate  score a fleet under one method
  compare    score a fleet under several methods, with divergence and bias
  synth      generate a synthetic fleet CSV from a scenario spec
  chart      render an emitted JSON report to SVG

Exit codes: 0 success, 1 hard data or schema error, 2 data quality threshold
exceeded (validate), 3 bad usage.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import yaml

from . import __version__
from .analysis import (
    METHOD_TOKENS,
    audit_document,
    compare_methods,
    emit_report,
    load_report_document,
)
from .charts import render_chart
from .errors import HiAggError, UnwritableOutput
from .ingest import audit_fleet, parse_catalogs, parse_fleet, serialize_fleet
from .model import Normalization, StrategyConfig
from .synthgen import FleetSpec, generate_fleet, load_fleet_spec

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_QUALITY = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is taken by the
    # quality gate, so usage problems must exit 3 instead
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UnwritableOutput(path, str(exc)) from exc


def _add_fleet_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in", dest="in_path", required=True, metavar="FLEET_CSV",
                   help="fleet inventory CSV")
    p.add_argument("--catalog", metavar="YAML",
                   help="severity/weight catalog overlay")


def _add_strategy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--normalization", choices=["raw", "normalized"],
                   default="normalized",
                   help="weighted average normalization (default: normalized)")
    p.add_argument("--cap-offset", type=int, default=3, metavar="N",
                   help="worst-case cap offset (default: 3)")
    p.add_argument("--power-exponent", type=float, default=-2.0, metavar="P",
                   help="power mean exponent for replacement_cost (default: -2)")
    p.add_argument("--invalid-threshold", type=float, default=0.25, metavar="F",
                   help="invalid fraction above which a bay is indeterminate "
                        "(default: 0.25)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json",
                   help="report format (default: json)")
    p.add_argument("--workers", type=int, default=1, metavar="N",
                   help="aggregation worker threads (default: 1)")


def _strategy_config(args) -> StrategyConfig:
    return StrategyConfig(
        normalization=Normalization(args.normalization),
        worst_case_cap_offset=args.cap_offset,
        power_mean_exponent=args.power_exponent,
        invalid_fraction_threshold=args.invalid_threshold,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="hiagg",
                     description="Health index aggregation for substation fleets")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("validate", help="audit fleet data quality")
    _add_fleet_args(p)
    p.add_argument("--invalid-threshold", type=float, default=0.25, metavar="F",
                   help="fail (exit 2) when the fleet invalid HI fraction "
                        "exceeds this (default: 0.25)")
    p.add_argument("--out", metavar="PATH", help="output path (default: stdout)")

    p = sub.add_parser("aggregate", help="score a fleet under one method")
    _add_fleet_args(p)
    p.add_argument("--method", choices=list(METHOD_TOKENS),
                   default="weighted_avg", help="aggregation method")
    _add_strategy_args(p)
    _add_output_args(p)

    p = sub.add_parser("compare", help="score a fleet under several methods")
    _add_fleet_args(p)
    p.add_argument("--methods", default="weighted_avg,fmeca,replacement_cost,"
                                        "failure_interpretation",
                   metavar="A,B,...",
                   help="comma separated method tokens (default: all four)")
    _add_strategy_args(p)
    p.add_argument("--percentile-gap", type=float, default=0.2, metavar="F",
                   help="bias flag threshold on percentile gap (default: 0.2)")
    _add_output_args(p)
    p.add_argument("--chart", metavar="SVG", help="also render charts to SVG")

    p = sub.add_parser("synth", help="generate a synthetic fleet CSV")
    p.add_argument("--spec", metavar="YAML", help="scenario spec (default: demo)")
    p.add_argument("--seed", type=int, metavar="N", help="override spec seed")
    p.add_argument("--out", metavar="PATH", help="output path (default: stdout)")

    p = sub.add_parser("chart", help="render an emitted JSON report to SVG")
    p.add_argument("--in", dest="in_path", required=True, metavar="REPORT_JSON")
    p.add_argument("--out", metavar="PATH", help="output path (default: stdout)")

    return parser


def _cmd_validate(args) -> int:
    substations = parse_fleet(args.in_path)
    severities, weights = parse_catalogs(args.catalog)
    audit = audit_fleet(substations, severities, weights)
    ok = audit.invalid_fraction <= args.invalid_threshold
    doc = audit_document(audit)
    doc["threshold"] = f"{args.invalid_threshold:.4f}"
    doc["ok"] = ok
    _write_text(args.out, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_QUALITY


def _run_report(args, tokens: list[str], include_bias: bool,
                percentile_gap: float) -> int:
    substations = parse_fleet(args.in_path)
    severities, weights = parse_catalogs(args.catalog)
    report = compare_methods(substations, tokens, severities, weights,
                             _strategy_config(args), workers=args.workers,
                             percentile_gap=percentile_gap,
                             include_bias=include_bias)
    _write_text(args.out, emit_report(report, args.format))
    chart_path = getattr(args, "chart", None)
    if chart_path:
        from .analysis import report_document
        _write_text(chart_path, render_chart(report_document(report)))
    return EXIT_OK


def _cmd_synth(args) -> int:
    if args.spec is not None:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                doc = yaml.safe_load(fh)
        except OSError as exc:
            print(f"{args.spec}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_DATA_ERROR
        except yaml.YAMLError as exc:
            print(f"{args.spec}: invalid yaml: {exc}", file=sys.stderr)
            return EXIT_DATA_ERROR
        spec = load_fleet_spec(doc if doc is not None else {})
    else:
        spec = FleetSpec()
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    fleet = generate_fleet(spec)
    _write_text(args.out, serialize_fleet(fleet))
    return EXIT_OK


def _cmd_chart(args) -> int:
    try:
        doc = load_report_document(args.in_path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DATA_ERROR
    _write_text(args.out, render_chart(doc))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits; keep main() returning codes
        return int(exc.code or 0)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "aggregate":
            return _run_report(args, [args.method], include_bias=False,
                               percentile_gap=0.2)
        if args.command == "compare":
            tokens = [t.strip() for t in args.methods.split(",") if t.strip()]
            bad = [t for t in tokens if t not in METHOD_TOKENS]
            if not tokens or bad:
                what = (f"unknown method {bad[0]!r}" if bad
                        else "empty method list")
                print(f"hiagg compare: error: --methods: {what} "
                      f"(choose from {', '.join(METHOD_TOKENS)})",
                      file=sys.stderr)
                return EXIT_USAGE
            return _run_report(args, tokens, include_bias=True,
                               percentile_gap=args.percentile_gap)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "chart":
            return _cmd_chart(args)
        print(f"hiagg: error: unknown command {args.command!r}",
              file=sys.stderr)
        return EXIT_USAGE
    except HiAggError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DATA_ERROR
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DATA_ERROR
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
