"""Command line entry point.

Exit codes: 0 yes/valid/ok, 1 no/invalid, 2 usage, parse or cap problems.
"""

from __future__ import annotations

import argparse
import sys

from .generators import corridor_fixture, grid_instance, rst_gadget
from .instance import ParseError, parse_instance, serialize_instance
from .minors import CapExceeded
from .oracle import oracle_makespan
from .representation import (extract_representation, parse_representation, realize_and_solve,
                             representation_for_cli)
from .schedule import ScheduleStructureError, parse_schedule, serialize_schedule, validate
from .solver import solve_bounded_ball, solve_iddfs, solve_optimal

YES, NO, ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(ERROR)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(args):
    inst = parse_instance(_read(args.input))
    if getattr(args, "budget", None) is not None:
        inst = inst.with_budget(args.budget)
    return inst


def cmd_solve(args) -> int:
    inst = _load(args)
    if args.ball:
        res = solve_bounded_ball(inst, max_states=args.max_states)
    elif args.algo == "iddfs":
        res = solve_iddfs(inst, max_states=args.max_states)
    else:
        res = solve_optimal(inst, max_states=args.max_states)
    if res.status == "cap-exceeded":
        print("cap-exceeded: state limit reached", file=sys.stderr)
        return ERROR
    if res.status != "solved":
        print(f"NO ({res.status})", file=sys.stderr)
        return NO
    _write(args.output, serialize_schedule(res.schedule))
    print(f"YES makespan {res.makespan}", file=sys.stderr)
    return YES


def cmd_validate(args) -> int:
    inst = _load(args)
    sched = parse_schedule(_read(args.schedule))
    rep = validate(inst, sched)
    if rep.valid:
        print("valid", file=sys.stderr)
        return YES
    v = rep.violation
    print(f"invalid step {v.step} {v.rule}: {v.message}", file=sys.stderr)
    return NO


def cmd_reduce(args) -> int:
    from .planar import kernelize
    from .reductions import reduce_bounded_treedepth, shorten_paths

    inst = _load(args)
    trace: list[str] = []
    rules = [r for r in args.rules.split(",") if r]
    for rule in rules:
        if rule not in ("shorten", "prune", "planar"):
            print(f"unknown rule {rule!r}", file=sys.stderr)
            return ERROR
    for rule in rules:
        if rule == "shorten":
            inst, log = shorten_paths(inst)
            trace += log
        elif rule == "prune":
            inst, log = reduce_bounded_treedepth(inst, args.treedepth)
            trace += log
        else:
            res = kernelize(inst, args.clean_threshold, args.roadmap_cap, args.desk_scale)
            trace += res.trace
            if res.status == "cap-exceeded":
                _emit_trace(args, trace)
                _write(args.output, serialize_instance(res.kernel))
                print("cap-exceeded: work limit reached during kernelization", file=sys.stderr)
                return ERROR
            inst = res.kernel
            if res.schedule is not None and args.schedule_out:
                _write(args.schedule_out, serialize_schedule(res.schedule))
    _emit_trace(args, trace)
    _write(args.output, serialize_instance(inst))
    return YES


def _emit_trace(args, trace):
    text = "".join(line + "\n" for line in trace)
    if args.trace:
        _write(args.trace, text)
    else:
        sys.stderr.write(text)


def cmd_generate(args) -> int:
    if args.kind == "grid":
        dest = [tuple(map(int, x.split(":"))) for x in args.dest.split(",")] if args.dest else None
        free = [int(x) for x in args.free.split(",")] if args.free else None
        if args.pattern == "random" and args.seed is None:
            print("--seed is required for the random pattern", file=sys.stderr)
            return ERROR
        inst = grid_instance(args.rows, args.cols, args.pattern, args.seed, density=args.density,
                             k_dest=args.k_dest, budget=args.budget, dest=dest, free=free)
    elif args.kind == "rst":
        pts = [tuple(map(int, p.split(","))) for p in args.points.split(";") if p]
        inst = rst_gadget(pts, args.ell)
    else:
        inst = corridor_fixture(args.length, args.family, args.ell, not args.no_pocket, args.seed or 0)
    _write(args.output, serialize_instance(inst))
    return YES


def cmd_repr(args) -> int:
    inst = _load(args)
    if args.action == "extract":
        sched = parse_schedule(_read(args.schedule))
        rep = extract_representation(inst, sched)
        _write(args.output, representation_for_cli(inst, rep))
        return YES
    from .instance import nonterminal_label

    h = parse_representation(_read(args.repr), nonterminal_label(inst))
    sched, why = realize_and_solve(inst, h, inst.budget, args.work_cap)
    if sched is None:
        print(f"NO ({why})", file=sys.stderr)
        return NO
    _write(args.output, serialize_schedule(sched))
    return YES


def cmd_oracle(args) -> int:
    inst = _load(args)
    try:
        m = oracle_makespan(inst, max_states=args.max_states)
    except RuntimeError as exc:
        print(f"cap-exceeded: {exc}", file=sys.stderr)
        return ERROR
    if m is None:
        print("NO")
        return NO
    print(f"YES {m}")
    return YES


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csmp", description="Coordinated sliding motion planning tools.")
    p.add_argument("--threads", type=int, default=1, help="worker count (results do not depend on it)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="optimal schedule within the budget")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("--budget", type=int)
    s.add_argument("--algo", choices=["bfs", "iddfs"], default="bfs")
    s.add_argument("--ball", action="store_true", help="restrict search to the ball around the main robot")
    s.add_argument("--max-states", type=int, default=10**7)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a schedule")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("-s", "--schedule", required=True)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("reduce", help="apply reduction rules")
    r.add_argument("-i", "--input", required=True)
    r.add_argument("--rules", default="shorten")
    r.add_argument("--budget", type=int)
    r.add_argument("--treedepth", type=int, default=1, help="largest separator tried by prune")
    r.add_argument("--clean-threshold", type=int)
    r.add_argument("--roadmap-cap", type=int)
    r.add_argument("--desk-scale", action="store_true")
    r.add_argument("--trace", help="write the trace here instead of standard error")
    r.add_argument("--schedule-out", help="where to write a schedule found while reducing")
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    g = sub.add_parser("generate", help="build instances")
    gsub = g.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    gg = gsub.add_parser("grid")
    gg.add_argument("--rows", type=int, required=True)
    gg.add_argument("--cols", type=int, required=True)
    gg.add_argument("--pattern", choices=["random", "corridor", "explicit"], default="random")
    gg.add_argument("--seed", type=int)
    gg.add_argument("--density", type=float, default=0.3)
    gg.add_argument("--k-dest", type=int, default=1)
    gg.add_argument("--budget", type=int, default=1)
    gg.add_argument("--dest", help="s:t pairs, comma separated")
    gg.add_argument("--free", help="blocker vertices, comma separated")
    gg.add_argument("-o", "--output")
    gr = gsub.add_parser("rst")
    gr.add_argument("--points", required=True, help="x,y pairs separated by ';'")
    gr.add_argument("--ell", type=int, required=True)
    gr.add_argument("-o", "--output")
    gc = gsub.add_parser("corridor")
    gc.add_argument("--length", type=int, required=True)
    gc.add_argument("--family", choices=["plain", "bays", "detour"], default="plain")
    gc.add_argument("--ell", type=int, default=2)
    gc.add_argument("--no-pocket", action="store_true")
    gc.add_argument("--seed", type=int)
    gc.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    rp = sub.add_parser("repr", help="representations")
    rsub = rp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    re_ = rsub.add_parser("extract")
    re_.add_argument("-i", "--input", required=True)
    re_.add_argument("-s", "--schedule", required=True)
    re_.add_argument("-o", "--output")
    rr = rsub.add_parser("realize")
    rr.add_argument("-i", "--input", required=True)
    rr.add_argument("-r", "--repr", required=True)
    rr.add_argument("--work-cap", type=int, default=10**6)
    rr.add_argument("-o", "--output")
    rp.set_defaults(func=cmd_repr)

    o = sub.add_parser("oracle", help="independent reference search")
    o.add_argument("-i", "--input", required=True)
    o.add_argument("--budget", type=int)
    o.add_argument("--max-states", type=int, default=5 * 10**6)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("--threads must be positive", file=sys.stderr)
        return ERROR
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(str(exc), file=sys.stderr)
        return ERROR
    except (ParseError, ScheduleStructureError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
