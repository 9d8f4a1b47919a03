"""``circloop`` command line: validate, plan, gen, report."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .documents import DocumentError, dumps, parse_economy, parse_plan
from .economy import EconomyError
from .generate import generate_economy
from .report import render_report, run_plan
from .search import SearchSpaceError

EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DocumentError(f"{path}: {exc}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _fail(exc: EconomyError) -> int:
    for line in exc.diagnostics:
        print(line, file=sys.stderr)
    return EXIT_PARSE if isinstance(exc, DocumentError) else EXIT_INVALID


def cmd_validate(args) -> int:
    try:
        parse_economy(_read(args.economy))
    except EconomyError as exc:
        return _fail(exc)
    return EXIT_OK


def cmd_plan(args) -> int:
    try:
        economy = parse_economy(_read(args.economy))
        plan = parse_plan(_read(args.plan), economy)
        result = run_plan(economy, plan, audit=args.audit, workers=args.workers)
    except EconomyError as exc:
        return _fail(exc)
    except SearchSpaceError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    _emit(json.dumps(result, indent=2) + "\n", args.output)
    summary = sys.stdout if args.output else sys.stderr
    status = "feasible" if result["feasible"] else f"INFEASIBLE (violation {result['total_violation']:.9g})"
    print(f"{result['algorithm']}: score {result['score']:.9g}, {status}", file=summary)
    print(f"  {len(result['moves'])} move(s), {result['nodes']} nodes, "
          f"circularity {result['circularity']:.3f}, {result['wall_time']:.3f}s", file=summary)
    for m in result["moves"]:
        print(f"  {m['owner']}.slot{m['slot']}: {m['from']} -> {m['to']}", file=summary)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        doc = generate_economy(
            args.seed, args.materials, args.levels, args.per_level, args.class_size,
            args.max_inputs, args.byproduct_rate,
        )
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    _emit(dumps(doc), args.output)
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        economy = parse_economy(_read(args.economy))
        try:
            result = json.loads(_read(args.result))
        except json.JSONDecodeError as exc:
            raise DocumentError(f"{args.result}: {exc}") from None
        if not isinstance(result, dict):
            raise DocumentError(f"{args.result}: expected a result object")
        text = render_report(economy, result)
    except EconomyError as exc:
        return _fail(exc)
    _emit(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circloop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an economy file")
    p.add_argument("economy")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="search for the best supplier binding")
    p.add_argument("economy")
    p.add_argument("plan")
    p.add_argument("-o", "--output")
    p.add_argument("--audit", action="store_true", help="recheck caches from scratch after every move")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("gen", help="generate a random layered economy")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--materials", type=int, default=4)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--per-level", type=int, default=4)
    p.add_argument("--class-size", type=int, default=2)
    p.add_argument("--max-inputs", type=int, default=3)
    p.add_argument("--byproduct-rate", type=float, default=0.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("report", help="CSV tables for a plan result")
    p.add_argument("economy")
    p.add_argument("result")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
