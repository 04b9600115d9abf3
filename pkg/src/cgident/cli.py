"""Command-line front end.

Exit codes: 0 success, 1 failed check (invariant violation, missing
stabilization, phase-4 sighting in negative mode, failing verdict),
2 usage error, 3 instance too large for the model checker.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import Output
from .engine import InvariantViolation, measure_scaling, run, scaling_csv
from .graph import GENERATOR_KINDS, GraphParseError, generate, is_complete, read_graph, \
    write_graph
from .modelcheck import DEFAULT_CAP, InstanceTooLarge, verify
from .protocols import make_protocol
from .scheduler import SCHEDULE_KINDS, Schedule
from .stats import loglog_slope
from .transform import f_transform, mirrored_run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TOO_LARGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _protocol_args(p: argparse.ArgumentParser, n_required=True) -> None:
    p.add_argument("--protocol", choices=("ciw_n", "ciw_nk", "cig"), required=True)
    p.add_argument("--n", type=int, required=n_required)
    p.add_argument("--k", type=int)


def _graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", default="complete",
                   help=f"generator kind ({', '.join(GENERATOR_KINDS)}) or a graph file")
    p.add_argument("--graph-seed", type=int, default=0)


def _build_protocol(args, n):
    if args.protocol == "ciw_nk":
        if args.k is None:
            raise UsageError("--k is required with --protocol ciw_nk")
        if not 1 <= args.k <= n:
            raise UsageError(f"--k must be in [1, {n}]")
    elif args.k is not None:
        raise UsageError("--k is only valid with --protocol ciw_nk")
    return make_protocol(args.protocol, n, args.k)


def _build_graph(args):
    if args.graph in GENERATOR_KINDS:
        if args.n is None:
            raise UsageError("--n is required with a generated graph")
        if args.n < 2:
            raise UsageError("--n must be >= 2")
        return generate(args.graph, args.n, args.graph_seed)
    path = Path(args.graph)
    if not path.exists():
        raise UsageError(f"unknown graph kind or missing file: {args.graph}")
    g = read_graph(path)
    if args.n is not None and args.n != g.n:
        raise UsageError(f"--n {args.n} does not match the graph file (n={g.n})")
    return g


def cmd_simulate(args) -> int:
    g = _build_graph(args)
    p = _build_protocol(args, g.n)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    records = []
    for trial in range(args.trials):
        sched = Schedule(g, args.schedule, args.seed, stream=trial, permute=args.permute)
        try:
            rec = run(p, g, sched, mode=args.mode, max_steps=args.max_steps,
                      invariant_checks=args.checks, census=args.checks,
                      fast_path=not args.checks)
        except InvariantViolation as exc:
            trace = Path(args.out + ".trace.json" if args.out else "violation-trace.json")
            trace.write_text(json.dumps(exc.trace, indent=2) + "\n")
            print(f"invariant violation; trace written to {trace}", file=sys.stderr)
            return EXIT_FAIL
        records.append(rec)
    _emit(json.dumps([r.to_json() for r in records], indent=2) + "\n", args.out)
    return EXIT_OK if all(r.ok for r in records) else EXIT_FAIL


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()] if text.strip() else []


def cmd_sweep(args) -> int:
    sizes = _int_list(args.sizes)
    ks = _int_list(args.ks) if args.ks is not None else None
    if not sizes:
        raise UsageError("--sizes must list at least one n")
    if args.protocol == "ciw_nk":
        if not ks:
            raise UsageError("--ks is required with --protocol ciw_nk")
        if any(not 1 <= k <= n for k in ks for n in sizes):
            raise UsageError("every k must satisfy 1 <= k <= n")
    elif ks:
        raise UsageError("--ks is only valid with --protocol ciw_nk")
    rows = measure_scaling(args.protocol, sizes, args.trials, args.seed, ks=ks,
                           graph=args.graph, schedule=args.schedule,
                           max_steps=args.max_steps, jobs=args.jobs)
    _emit(scaling_csv(rows), args.out)
    if len(sizes) >= 3 and (not ks or len(ks) == 1):
        slope = loglog_slope([(r.n, r.mean_steps) for r in rows])
        print(f"log-log slope of mean steps vs n: {slope:.3f}", file=sys.stderr)
    flagged = sum(r.flagged for r in rows)
    if flagged:
        print(f"{flagged} trial(s) hit max_steps without stabilizing", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_modelcheck(args) -> int:
    g = _build_graph(args)
    p = _build_protocol(args, g.n)
    expected = Output(args.expected) if args.expected else None
    try:
        verdict = verify(p, g, expected, cap=args.cap)
    except InstanceTooLarge as exc:
        print(f"instance too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    _emit(json.dumps(verdict.to_json(p, g), indent=2) + "\n", args.out)
    return EXIT_OK if verdict.solves else EXIT_FAIL


def cmd_transform(args) -> int:
    g = read_graph(args.inp)
    fg = f_transform(g)
    write_graph(fg, args.out)
    print(json.dumps({"n": fg.n, "arcs": fg.m, "is_complete": is_complete(fg)}))
    return EXIT_OK


def cmd_mirror_demo(args) -> int:
    g = _build_graph(args)
    p = _build_protocol(args, g.n)
    sched = Schedule(g, args.schedule, args.seed)
    result = mirrored_run(p, g, sched, args.steps)
    print(json.dumps(result.to_json(), indent=2))
    return EXIT_OK if result.held else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgident", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run seeded trials and dump RunRecords as JSON")
    _protocol_args(p, n_required=False)
    _graph_args(p)
    p.add_argument("--schedule", choices=SCHEDULE_KINDS, default="uniform_random")
    p.add_argument("--permute", action="store_true",
                   help="round_robin: use a seeded arc order instead of lexicographic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--mode", choices=("positive", "negative"), default="positive")
    p.add_argument("--checks", action=argparse.BooleanOptionalAction, default=True,
                   help="per-step invariant checks and state census (reference path)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="scaling statistics as CSV")
    p.add_argument("--protocol", choices=("ciw_n", "ciw_nk", "cig"), required=True)
    p.add_argument("--sizes", required=True, help="comma-separated list of n")
    p.add_argument("--ks", help="comma-separated list of k (ciw_nk)")
    p.add_argument("--graph", choices=GENERATOR_KINDS, default="complete")
    p.add_argument("--schedule", choices=SCHEDULE_KINDS, default="uniform_random")
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("modelcheck", help="exhaustive global-fairness verdict as JSON")
    _protocol_args(p, n_required=False)
    _graph_args(p)
    p.add_argument("--expected", choices=("yes", "no"))
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_modelcheck)

    p = sub.add_parser("transform", help="write f(G) for a graph file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("mirror-demo", help="lockstep run on G and f(G)")
    _protocol_args(p, n_required=False)
    _graph_args(p)
    p.add_argument("--schedule", choices=SCHEDULE_KINDS, default="round_robin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=10_000)
    p.set_defaults(func=cmd_mirror_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, GraphParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
