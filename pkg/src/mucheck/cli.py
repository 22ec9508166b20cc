"""Command-line front end: parse model and property, check, emit evidence.

Exit codes: 0 property holds, 1 property fails, 2 usage or input error,
3 resource bound exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .evidence import evidence_lts, export_aut, export_dot_lts
from .formula import FormulaError, parse_formula
from .kernel import BoundExceeded, Bounds, StateExplosion
from .model import parse_lpe
from .parsing import ParseError
from .transform import run_direct, run_pipeline, run_plain

log = logging.getLogger("mucheck")

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_BOUNDS = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="check",
        description="Check a modal mu-calculus property of a linear process "
                    "and generate witness/counterexample evidence.")
    parser.add_argument("model", help="process description (.lpe)")
    parser.add_argument("property", help="mu-calculus formula (.mcf)")
    parser.add_argument(
        "--mode", choices=("plain", "direct", "two-step"), default="two-step",
        help="plain: verdict only from the core encoding; direct: solve the "
             "full evidence system once; two-step: solve the core, then the "
             "restricted evidence system (default)")
    parser.add_argument("--stats", metavar="PATH",
                        help="write solving statistics as JSON")
    parser.add_argument("--evidence", metavar="PATH",
                        help="write the witness/counterexample LTS "
                             "(.aut or .dot by extension)")
    parser.add_argument("--quantifier-cap", type=int, default=10_000,
                        metavar="N", help="max quantifier range (default 10000)")
    parser.add_argument("--max-vertices", type=int, default=10_000_000,
                        metavar="N", help="max explored vertices (default 10000000)")
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        model_text = Path(args.model).read_text(encoding="utf-8")
        property_text = Path(args.property).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    bounds = Bounds(quantifier_cap=args.quantifier_cap,
                    max_vertices=args.max_vertices)
    try:
        lpe = parse_lpe(model_text)
        phi = parse_formula(property_text)
    except (ParseError, FormulaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if lpe.init is None:
        print("error: model has no `init` declaration", file=sys.stderr)
        return EXIT_USAGE

    runner = {"plain": run_plain, "direct": run_direct,
              "two-step": run_pipeline}[args.mode]
    try:
        result = runner(lpe, phi, lpe.init, bounds)
        if args.evidence:
            if result.evidence is None:
                print("error: --evidence requires --mode=direct or two-step",
                      file=sys.stderr)
                return EXIT_USAGE
            lts = evidence_lts(result.evidence, lpe, lpe.init, bounds)
            _write_evidence(Path(args.evidence), lts)
    except (BoundExceeded, StateExplosion) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUNDS
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.stats:
        Path(args.stats).write_text(
            json.dumps(result.stats(), indent=2) + "\n", encoding="utf-8")

    print("true" if result.verdict else "false")
    return EXIT_HOLDS if result.verdict else EXIT_FAILS


def _write_evidence(path: Path, lts) -> None:
    if path.suffix == ".dot":
        path.write_text(export_dot_lts(lts), encoding="utf-8")
    else:
        path.write_text(export_aut(lts), encoding="utf-8")


def _configure_logging() -> None:
    level = os.environ.get("CHECK_LOG", "").lower()
    if level in ("debug", "info"):
        logging.basicConfig(
            level=logging.DEBUG if level == "debug" else logging.INFO,
            format="%(levelname)s %(name)s: %(message)s")


if __name__ == "__main__":
    sys.exit(main())
