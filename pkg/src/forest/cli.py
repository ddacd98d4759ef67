"""``forest`` command line: run | invert | translate | check | prop | bench.

Exit codes: 0 success, 1 failure (bottom) or failing property suite,
2 parse/validation/argument error, 3 fuel exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from pathlib import Path

from . import msrl as ms
from .interp import Failure, FuelExhausted, Program, State, Success, TraceEvent
from .parser import Diagnostic, ParseError, SourceFile, parse_forest, parse_msrl, pretty_forest
from .programs import BUNDLES, bench
from .syntax import IllFormedError, dom, invert, validate

EXIT_OK, EXIT_BOTTOM, EXIT_INPUT, EXIT_FUEL = 0, 1, 2, 3

_INIT_ITEM = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?[0-9]+)\s*$")


class UsageError(Exception):
    pass


def parse_init(text: str | None) -> dict[str, int]:
    """``x=3,y=-7`` -> {"x": 3, "y": -7}; later entries win."""
    out: dict[str, int] = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        m = _INIT_ITEM.match(item)
        if not m:
            raise UsageError(f"bad --init entry {item!r}; expected name=integer")
        out[m.group(1)] = int(m.group(2))
    return out


def _load_forest(path: str, allow_internal: bool):
    warnings: list[Diagnostic] = []
    term = parse_forest(SourceFile.read(path), allow_internal=allow_internal, warnings=warnings)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    violations = validate(term)
    if violations:
        raise IllFormedError(violations)
    return term


def cmd_run(args) -> int:
    init = parse_init(args.init)
    term = _load_forest(args.file, args.allow_internal)
    out = sys.stdout
    trace = None
    if args.trace and not args.json:
        def trace(event: TraceEvent) -> None:
            print(event, file=out)
    outcome, stats = Program(term, check=False).run(State(init), args.fuel, trace=trace)
    shown = sorted(dom(term) | set(init))
    if args.json:
        doc = {"schemaVersion": 1, "stats": stats.as_dict()}
        if isinstance(outcome, Success):
            doc.update(outcome="success", state=outcome.state.restrict(shown))
        elif isinstance(outcome, Failure):
            doc.update(outcome="failure", state=None, reason=outcome.reason,
                       location=str(outcome.loc))
        else:
            doc.update(outcome="fuel-exhausted", state=None, stepsUsed=outcome.steps_used)
        print(json.dumps(doc, sort_keys=True), file=out)
    elif isinstance(outcome, Success):
        for name, value in outcome.state.restrict(shown).items():
            print(f"{name}={value}", file=out)
    elif isinstance(outcome, Failure):
        print(f"BOTTOM: {outcome.reason} at {args.file}:{outcome.loc}", file=out)
    else:
        print(f"FUEL EXHAUSTED after {outcome.steps_used} steps", file=out)
    if args.stats and not args.json:
        s = stats.as_dict()
        print("stats: " + " ".join(f"{k}={v}" for k, v in s.items()), file=out)
    if isinstance(outcome, Success):
        return EXIT_OK
    return EXIT_BOTTOM if isinstance(outcome, Failure) else EXIT_FUEL


def cmd_invert(args) -> int:
    term = _load_forest(args.file, args.allow_internal)
    print(pretty_forest(invert(term)))
    return EXIT_OK


def cmd_translate(args) -> int:
    term = parse_msrl(SourceFile.read(args.file))
    violations = ms.validate_msrl(term)
    if violations:
        raise IllFormedError(violations)
    print(pretty_forest(ms.translate(term)))
    return EXIT_OK


def cmd_check(args) -> int:
    src = SourceFile.read(args.file)
    if args.file.endswith(".srl"):
        violations = ms.validate_msrl(parse_msrl(src))
    else:
        violations = validate(parse_forest(src, allow_internal=args.allow_internal))
    if not violations:
        print("ok")
        return EXIT_OK
    for v in violations:
        print(f"{args.file}:{v.loc}: {v.kind}: {v.message}")
    return EXIT_INPUT


def cmd_prop(args) -> int:
    from .testkit import property_suite

    seed = args.seed
    if seed is None:
        env = os.environ.get("FOREST_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"FOREST_SEED must be an integer, got {env!r}") from None
    report = property_suite(args.count, seed=seed)
    print(report.to_json() if args.json else report.text())
    return EXIT_OK if report.ok else EXIT_BOTTOM


def cmd_bench(args) -> int:
    if args.program not in BUNDLES:
        raise UsageError(f"unknown program {args.program!r}; choose from {', '.join(BUNDLES)}")
    lo, hi = args.range
    if lo > hi:
        raise UsageError("--range LO HI needs LO <= HI")
    rows = bench(args.program, lo, hi)
    if rows:
        writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    if args.plot:
        from .plotting import bench_figure

        path = bench_figure(rows, args.plot, f"{args.program} over [{lo}, {hi}]")
        print(f"figure written to {path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forest", description="reversible, always-terminating loops")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="interpret a .fst program")
    r.add_argument("file")
    r.add_argument("--init", help="initial values, e.g. x=3,y=-7 (others default to 0)")
    r.add_argument("--trace", action="store_true", help="print one line per applied rule")
    r.add_argument("--stats", action="store_true", help="append step counts")
    r.add_argument("--fuel", type=int, help="cap on loop unfoldings")
    r.add_argument("--json", action="store_true", help="emit one JSON object")
    r.set_defaults(func=cmd_run)

    i = sub.add_parser("invert", help="print the inverse of a .fst program")
    i.add_argument("file")
    i.set_defaults(func=cmd_invert)

    t = sub.add_parser("translate", help="translate an .srl program to forest")
    t.add_argument("file")
    t.set_defaults(func=cmd_translate)

    c = sub.add_parser("check", help="report well-formedness violations")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    for sp in (r, i, c):
        sp.add_argument("--allow-internal", action="store_true",
                        help="accept '_'-prefixed names, e.g. translator output")

    pr = sub.add_parser("prop", help="run the randomized property suite")
    pr.add_argument("count", type=int, nargs="?", default=1000)
    pr.add_argument("--seed", type=int, default=None, help="default: $FOREST_SEED or 0")
    pr.add_argument("--json", action="store_true")
    pr.set_defaults(func=cmd_prop)

    b = sub.add_parser("bench", help="step counts of a shipped program over an input grid (CSV)")
    b.add_argument("program", help=", ".join(BUNDLES))
    b.add_argument("--range", type=int, nargs=2, default=(-50, 50), metavar=("LO", "HI"))
    b.add_argument("--plot", help="also write a figure (PNG/PDF/SVG by extension)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as e:
        for d in e.errors:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_INPUT
    except IllFormedError as e:
        for v in e.violations:
            print(f"error: {getattr(args, 'file', '')}:{v.loc}: {v.kind}: {v.message}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
