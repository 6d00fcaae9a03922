"""Command-line front end.

Usage:
    torus-a2a feasible K N [--format human|json|csv]
    torus-a2a classes K N [--format ...] [--max-nodes B]
    torus-a2a schedule K N --out FILE [--strategy any|nearest] [--format ...]
    torus-a2a verify FILE [--format ...] [--max-nodes B]
    torus-a2a scan --k LO..HI --n LO..HI [--max-nodes B] [--format ...]
    torus-a2a numtheory seq Q R | legendre Q P | carries Q A B | floorsum M Q

Exit codes: 0 success or feasible, 1 negative result, 2 usage or
validation error, 3 budget exceeded.  Machine formats (json, csv) go to
stdout and are byte-stable; diagnostics go to stderr.  The node budget
defaults to the MAX_NODES environment variable when set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import numtheory as nt
from .counting import ENUMERATION_BUDGET, class_count_factored, class_table_oracle
from .feasibility import cross_validate, divisibility_report
from .numtheory import BudgetExceeded
from .schedule import (
    SIMULATION_BUDGET,
    STRATEGIES,
    InfeasibleWitness,
    build_balanced_tree,
    link_loads,
    verify_schedule,
)
from .schedule_io import ScheduleFormatError, read_schedule, write_schedule
from .torus import ShapeError, TorusShape

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
BUDGET_ENV = "MAX_NODES"


class UsageError(Exception):
    pass


def _env_budget(default: int) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _budget(args, default: int = ENUMERATION_BUDGET) -> int:
    return args.max_nodes if args.max_nodes is not None else _env_budget(default)


def _shape(args) -> TorusShape:
    try:
        return TorusShape(args.k, args.n)
    except ShapeError as exc:
        raise UsageError(str(exc)) from None


def _int_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(lo_i, hi_i + 1)


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({f: str(row[f]).lower() if isinstance(row[f], bool) else row[f] for f in fields})
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _yes(flag) -> str:
    return {True: "true", False: "false", None: "not enumerated"}[flag]


def cmd_feasible(args) -> int:
    shape = _shape(args)
    report = divisibility_report(shape, _budget(args))
    if args.format == "json":
        sys.stdout.write(_json(report.to_dict()))
    elif args.format == "csv":
        rows = [dict(report.to_dict(), witnesses=len(report.witnesses),
                     first_witness=str(report.witnesses[0]) if report.witnesses else "")]
        sys.stdout.write(_csv(rows, ["k", "n", "nodes", "brute", "analytic", "theorem", "agree", "first_witness"]))
    else:
        print(f"torus k={shape.k} n={shape.n} ({shape.node_count} nodes, 2n={shape.degree})")
        print(f"  class divisibility (enumerated): {_yes(report.verdict_bruteforce)}")
        print(f"  valuation criterion:             {_yes(report.verdict_analytic)}")
        print(f"  n power of 2 and k odd:          {_yes(report.verdict_theorem)}")
        for w in report.witnesses:
            print(f"  witness: class (t={w.key.t}, p={w.key.p}, v={w.key.v}) has {w.count} nodes, not divisible by {w.divisor}")
    if not report.agree:
        print("error: feasibility predicates disagree", file=sys.stderr)
        return EXIT_NEGATIVE
    return EXIT_OK if report.feasible else EXIT_NEGATIVE


def cmd_classes(args) -> int:
    shape = _shape(args)
    oracle = class_table_oracle(shape, _budget(args))
    rows = []
    for key in oracle.keys():
        factored = class_count_factored(shape, key)
        count = oracle.entries[key]
        rows.append(dict(t=key.t, p=key.p, v=key.v, count=count, factored=factored, match=count == factored))
    ok = all(r["match"] for r in rows) and oracle.total() == shape.node_count - 1
    fields = ["t", "p", "v", "count", "factored", "match"]
    if args.format == "json":
        sys.stdout.write(_json(rows))
    elif args.format == "csv":
        sys.stdout.write(_csv(rows, fields))
    else:
        print(f"classes of k={shape.k} n={shape.n} ({shape.node_count - 1} non-reference nodes)")
        print(f"{'t':>4} {'p':>3} {'v':>3} {'count':>10} {'factored':>10}  match")
        for r in rows:
            print(f"{r['t']:>4} {r['p']:>3} {r['v']:>3} {r['count']:>10} {r['factored']:>10}  {_yes(r['match'])}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def _print_profile(profile, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(_json(profile.to_dict()))
        return
    rows = [dict(step=t, direction=str(e), load=c) for t, step in enumerate(profile.loads, 1) for e, c in step.items()]
    if fmt == "csv":
        sys.stdout.write(_csv(rows, ["step", "direction", "load"]))
        return
    print(f"link loads per step (balanced: {_yes(profile.balanced)})")
    for t, step in enumerate(profile.loads, 1):
        values = sorted(set(step.values()))
        print(f"  step {t}: " + (f"{values[0]} per link" if len(values) == 1 else str({str(e): c for e, c in step.items()})))


def cmd_schedule(args) -> int:
    shape = _shape(args)
    result = build_balanced_tree(shape, _budget(args), strategy=args.strategy)
    if isinstance(result, InfeasibleWitness):
        if args.format == "json":
            sys.stdout.write(_json({"k": shape.k, "n": shape.n, "feasible": False, "witness": result.to_dict()}))
        else:
            print(f"infeasible: {result}")
        return EXIT_NEGATIVE
    write_schedule(result, args.out)
    _print_profile(link_loads(result), args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        tree = read_schedule(args.file)
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    except ScheduleFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = verify_schedule(tree.shape, tree, _budget(args, SIMULATION_BUDGET))
    profile = link_loads(tree)
    if args.format == "json":
        sys.stdout.write(_json(dict(report.to_dict(), k=tree.shape.k, n=tree.shape.n,
                                    loads=profile.per_step() if profile.balanced else None)))
    elif args.format == "csv":
        row = dict(k=tree.shape.k, n=tree.shape.n, **{f: getattr(report, f) for f in ("nodup_ok", "shortest_ok", "balance_ok", "steps")},
                   passed=report.passed)
        sys.stdout.write(_csv([row], list(row)))
    else:
        print(f"schedule for k={tree.shape.k} n={tree.shape.n}")
        print(f"  received once and only once: {_yes(report.nodup_ok)}")
        print(f"  shortest paths:              {_yes(report.shortest_ok)}")
        print(f"  balanced link loads:         {_yes(report.balance_ok)}")
        print(f"  steps: {report.steps} (diameter {tree.shape.diameter})")
        if profile.balanced:
            print("  loads: " + ",".join(map(str, profile.per_step())))
        for node, src, detail in report.violations:
            print(f"  violation at {list(node)} item {list(src)}: {detail}")
    return EXIT_OK if report.passed and report.steps == tree.shape.diameter else EXIT_NEGATIVE


def cmd_scan(args) -> int:
    grid = cross_validate(args.k, args.n, _budget(args))
    if args.format == "json":
        sys.stdout.write(grid.to_json() + "\n")
    elif args.format == "csv":
        sys.stdout.write(grid.to_csv())
    else:
        print(f"{'k':>3} {'n':>3} {'nodes':>8}  brute  analytic  theorem  first witness")
        for rec in grid.records():
            print(
                f"{rec['k']:>3} {rec['n']:>3} {rec['nodes']:>8}  {str(rec['brute']).lower():<5}  "
                f"{str(rec['analytic']).lower():<8}  {str(rec['theorem']).lower():<7}  {rec['first_witness']}"
            )
    for bad in grid.disagreements:
        print(f"error: predicates disagree on k={bad.shape.k} n={bad.shape.n}: {bad.to_dict()}", file=sys.stderr)
    return EXIT_OK if grid.all_agree else EXIT_NEGATIVE


def cmd_numtheory(args) -> int:
    try:
        if args.what == "seq":
            print(" ".join(map(str, nt.s_sequence(args.q, args.r))))
        elif args.what == "legendre":
            print(nt.valuation_factorial(args.q, args.p))
        elif args.what == "carries":
            if not nt.is_prime(args.q):
                raise nt.NotPrimeError(f"{args.q} is not prime")
            carries = nt.carries_in_addition(args.a, args.b, args.q)
            val = nt.valuation(args.q, nt.binomial(args.a + args.b, args.a))
            print(f"carries={carries} valuation={val}")
        elif args.what == "floorsum":
            print(nt.floor_sum(args.m, args.q))
    except BudgetExceeded:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torus-a2a",
        description="Optimal all-port all-to-all broadcast on k-ary n-dimensional tori.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True):
        p.add_argument("--format", choices=("human", "json", "csv"), default="human")
        if budget:
            p.add_argument("--max-nodes", type=int, default=None, help=f"node budget (env {BUDGET_ENV})")

    def shape_args(p):
        p.add_argument("k", type=int, help="arity (nodes per ring), >= 3")
        p.add_argument("n", type=int, help="dimension, >= 1")

    p = sub.add_parser("feasible", help="decide optimal-broadcast feasibility three ways")
    shape_args(p)
    common(p)
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("classes", help="class counts, enumerated and factored")
    shape_args(p)
    common(p)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("schedule", help="build a balanced broadcast schedule")
    shape_args(p)
    p.add_argument("--out", required=True, help="schedule file to write")
    p.add_argument("--strategy", choices=STRATEGIES, default="any")
    common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("verify", help="simulate and check a schedule file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="cross-validate the feasibility predicates over a grid")
    p.add_argument("--k", type=_int_range, required=True, metavar="LO..HI")
    p.add_argument("--n", type=_int_range, required=True, metavar="LO..HI")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("numtheory", help="exact number-theory helpers")
    nsub = p.add_subparsers(dest="what", required=True)
    q = nsub.add_parser("seq", help="the base-q sequence of depth r")
    q.add_argument("q", type=int)
    q.add_argument("r", type=int)
    q = nsub.add_parser("legendre", help="exponent of prime q in p!")
    q.add_argument("q", type=int)
    q.add_argument("p", type=int)
    q = nsub.add_parser("carries", help="carries of a + b in base q and the valuation of C(a+b, a)")
    q.add_argument("q", type=int)
    q.add_argument("a", type=int)
    q.add_argument("b", type=int)
    q = nsub.add_parser("floorsum", help="sum of m // q^j for j >= 1")
    q.add_argument("m", type=int)
    q.add_argument("q", type=int)
    p.set_defaults(func=cmd_numtheory)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
