"""Command-line interface: ``polyclp analyze`` and ``polyclp transform``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from typing import Sequence

from .engine import AnalysisConfig, ConfigError, NonConvergence, analyze
from .report import RunReport
from .syntax import ParseError, Program, parse_program
from .transforms import Norm, TransformError, parse_goal, query_answer_transform, size_abstract

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyclp", description="Convex polyhedral analysis of CLP programs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def transform_flags(p):
        p.add_argument("file")
        p.add_argument("--qa", metavar="GOAL", help='query-answer transform for a goal, e.g. "main(X,Y)"')
        p.add_argument("--norm", choices=[n.value for n in Norm], help="size-norm abstraction")

    an = sub.add_parser("analyze", help="compute the polyhedral model of a program")
    transform_flags(an)
    an.add_argument("--delay", type=int, default=0, metavar="K", help="widening delay")
    an.add_argument("--narrow", type=int, default=0, metavar="K", help="narrowing passes")
    an.add_argument("--widen-up-to", action="store_true", help="widening up-to the bounding polyhedra")
    an.add_argument(
        "--wp",
        default="cutloop",
        metavar="STRATEGY",
        help="widening points: cutloop, feedback, none, or @FILE listing name/arity entries",
    )
    an.add_argument("--verbose", action="store_true", help="include the fixpoint trace")
    an.add_argument("--show-counts", action="store_true", help="constraint count and iterations per SCC")
    an.add_argument("--time", action="store_true", help="wall-clock duration")
    an.add_argument("--format", choices=["text", "json"], default="text")

    tr = sub.add_parser("transform", help="print the transformed program")
    transform_flags(tr)
    return ap


def _load(args) -> Program:
    try:
        with open(args.file, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ParseError(f"cannot read {args.file}: {e.strerror}") from None
    program = parse_program(text)
    if args.norm:
        program = size_abstract(program, args.norm)
    if args.qa:
        program = query_answer_transform(program, parse_goal(args.qa))
    return program


def _widening_points(strategy: str, program: Program):
    if not strategy.startswith("@"):
        if strategy not in ("cutloop", "feedback", "none"):
            raise ConfigError(f"unknown widening-point strategy {strategy!r}")
        return strategy
    try:
        with open(strategy[1:], encoding="utf-8") as f:
            entries = f.read().split()
    except OSError as e:
        raise ConfigError(f"cannot read {strategy[1:]}: {e.strerror}") from None
    known = {f"{n}/{a}": (n, a) for n, a in program.predicates()}
    points = []
    for e in entries:
        if e not in known:
            raise ConfigError(f"widening point {e} is not a defined predicate")
        points.append(known[e])
    return tuple(points)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        program = _load(args)
        if args.command == "transform":
            out.write(str(program))
            return EXIT_OK
        cfg = AnalysisConfig(
            widen_delay=args.delay,
            narrow_iters=args.narrow,
            widen_up_to=args.widen_up_to,
            wp_strategy=_widening_points(args.wp, program),
            verbose=args.verbose,
        )
        start = time.perf_counter()
        result = analyze(program, cfg)
        elapsed = time.perf_counter() - start
    except ParseError as e:
        err.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except (ConfigError, TransformError) as e:
        err.write(f"configuration error: {e}\n")
        return EXIT_CONFIG
    except NonConvergence as e:
        err.write(f"non-convergence: {e}\n")
        return EXIT_NONCONVERGENCE
    report = RunReport.from_result(
        program,
        result,
        show_counts=args.show_counts,
        duration=elapsed if args.time else None,
        show_trace=args.verbose,
    )
    out.write(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK


def main() -> None:
    logging.basicConfig(level=logging.WARNING)
    sys.exit(run())
