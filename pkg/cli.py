"""Command-line front end: family pipelines and generic ring-file analysis."""

import argparse
import logging
import sys
from typing import List, Optional, Tuple

import config
from cech import CechError
from pipelines import PipelineError, analyze, run_family_a, run_family_b
from report import Report
from ring_files import RingFileError
from rings import RingError
from scalars import ScalarError
from semilinear import SemilinearError

logger = logging.getLogger(__name__)

USAGE_ERRORS = (RingFileError, RingError, CechError, ScalarError, SemilinearError, PipelineError, ValueError, OSError)


def parse_degree(text: str) -> Tuple[int, ...]:
    """'-2' or '-2,-2' -> degree vector."""
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid degree {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsing", description="Frobenius actions on top local cohomology.")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run a family pipeline")
    verify.add_argument("family", choices=["family-a", "family-b"])
    verify.add_argument("--p", type=int, required=True)
    verify.add_argument("--allow-large", action="store_true", help="allow p = 5 for family B")
    verify.add_argument("--json", metavar="OUT", help="write the JSON report here")
    verify.add_argument("--no-timings", action="store_true")

    ring = commands.add_parser("analyze", help="analyze a ring definition file")
    ring.add_argument("path")
    ring.add_argument("action", choices=["basis", "frobenius", "kernel", "certify"])
    ring.add_argument("--degree", type=parse_degree)
    ring.add_argument("--veronese", type=int)
    ring.add_argument("--class", dest="class_literal")
    ring.add_argument("--e", type=int, default=1)
    ring.add_argument("--base-change", action="store_true")
    ring.add_argument("--n", type=int)
    ring.add_argument("--probe-cap", type=int)
    ring.add_argument("--json", metavar="OUT")
    ring.add_argument("--no-timings", action="store_true")
    return parser


def _run(args: argparse.Namespace) -> Report:
    if args.command == "verify":
        if args.family == "family-a":
            return run_family_a(args.p)
        return run_family_b(args.p, allow_large=args.allow_large)
    return analyze(args.path, args.action, degree=args.degree, veronese=args.veronese,
                   class_literal=args.class_literal, e=args.e, use_base_change=args.base_change,
                   n=args.n, probe_cap=args.probe_cap)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns 0 on overall pass, 1 on fail and 2 on a usage error."""
    logging.basicConfig(level=config.LOG_LEVEL, format=config.LOG_FORMAT)
    args = build_parser().parse_args(argv)
    include_timings = config.REPORT_INCLUDE_TIMINGS and not args.no_timings
    try:
        report = _run(args)
    except USAGE_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2

    print(report.to_text(include_timings))
    if args.json:
        report.write_json(args.json, include_timings)
    return 0 if report.overall_pass else 1


if __name__ == "__main__":
    sys.exit(main())
