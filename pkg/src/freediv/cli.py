"""Command line entry point: ``freediv analyze --vars x,y --poly "x*y"``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile

from .logderiv import InvariantError, NonReducedError
from .report import STAGES, AnalysisConfig, Cache, InvalidInput, analyze, dumps, render_text

EXIT_OK, EXIT_INVALID, EXIT_NON_REDUCED, EXIT_INVARIANT = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freediv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="run the diagnostics pipeline on one polynomial")
    a.add_argument("--vars", required=True, help="comma separated variable names, e.g. x1,x2,x3")
    a.add_argument("--poly", required=True, help="polynomial text, or @FILE to read it from a file")
    a.add_argument("--stages", help="comma separated subset of: " + ",".join(STAGES))
    a.add_argument("--budget-secs", type=float, default=600.0, help="per-stage time budget (default 600)")
    a.add_argument("--budget-steps", type=int, default=None, help="per-stage step budget")
    out = a.add_mutually_exclusive_group()
    out.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
    out.add_argument("--text", action="store_true", help="print a human readable summary")
    a.add_argument("--timings", action="store_true",
                   help="add wall times and cache hits to the report (makes it non-reproducible)")
    a.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")
    a.add_argument("-v", "--verbose", action="store_true")
    return parser


def _read_poly(arg: str) -> str:
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return fh.read()
    return arg


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run_analyze(args) -> int:
    try:
        config = AnalysisConfig(
            poly=_read_poly(args.poly),
            variables=args.vars,
            stages=[s.strip() for s in args.stages.split(",") if s.strip()] if args.stages else None,
            budget_seconds=args.budget_secs,
            budget_steps=args.budget_steps,
            output=args.json,
            fmt="text" if args.text else "json",
            timings=args.timings,
        )
        doc = analyze(config, cache=None if args.no_cache else Cache())
    except (InvalidInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonReducedError as exc:
        print(f"error: polynomial is not reduced; gcd(f, df) = {exc.witness}", file=sys.stderr)
        return EXIT_NON_REDUCED
    except InvariantError as exc:
        print(f"internal invariant failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if config.fmt == "text":
        text = render_text(doc)
    else:
        text = dumps(doc)
    _write(config.output or "-", text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "analyze":
        return run_analyze(args)
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
