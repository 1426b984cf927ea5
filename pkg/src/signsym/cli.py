"""Command line front end.

Subcommands: detect, improve, orbitmip, lift, check, solve.  Exit codes are
0 on success, 2 for input errors and 3 when a search or solver limit is hit.
In cycle text a leading ``-`` marks a complemented literal; orbit listings
print complemented literals with a ``~`` prefix.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import autom, heur, liftsym, subsolver
from .formats import (
    CycleSyntaxError,
    DocumentError,
    format_cycles,
    format_literal,
    format_problem,
    format_row,
    format_row_permutation,
    parse_cycles,
    parse_solution,
    problem_to_json,
    read_problem,
)
from .model import (
    CONSTRAINT_ONLY,
    FULL,
    BinaryProblem,
    DimensionError,
    OrbitPartition,
    check_symmetry,
    closure,
    evaluate,
    orbits,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_LIMIT = 3
ORDER_CAP = 10**5

log = logging.getLogger("signsym")


class InputError(Exception):
    pass


def _num(value: Fraction) -> str:
    return str(value)


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(text_lines))


def _load(args) -> BinaryProblem:
    try:
        return read_problem(args.problem)
    except OSError as exc:
        raise InputError(f"cannot read {args.problem}: {exc.strerror}") from None


def _load_solution(args, problem: BinaryProblem):
    try:
        values = parse_solution(Path(args.solution).read_text(), problem.n)
    except OSError as exc:
        raise InputError(f"cannot read {args.solution}: {exc.strerror}") from None
    sol = evaluate(problem, values)
    if not sol.feasible:
        raise InputError(f"solution {sol.bits()} is infeasible")
    return sol


def _orbit_listing(problem: BinaryProblem, part) -> list[list[str]]:
    if isinstance(part, OrbitPartition):
        return [[problem.var_names[j] for j in cls] for cls in part.classes]
    return [[format_literal(problem, l.var, l.negated) for l in cls] for cls in part.classes]


def _symmetries(problem, mode, signed, node_budget):
    """(generators as (perm, rows) pairs, complete flag)."""
    try:
        if signed:
            return liftsym.detect_signed(problem, mode, node_budget), True
        return autom.detect_unsigned(problem, mode, node_budget), True
    except autom.SearchBudgetExceeded as exc:
        gens = exc.generators
        if not signed:
            gens = [(cols, rows) for rows, cols in gens]
        return gens, False


def cmd_detect(args) -> int:
    problem = _load(args)
    mode = CONSTRAINT_ONLY if args.constraint_only else FULL
    gens, complete = _symmetries(problem, mode, args.signed, args.node_budget)
    perms = [g for g, _ in gens]
    part = orbits(perms, problem.n, signed=args.signed)
    group = closure(perms, ORDER_CAP, n=problem.n)
    cycles = [format_cycles(g) for g in perms]
    listing = _orbit_listing(problem, part)
    payload = {
        "problem": problem.name,
        "mode": mode,
        "signed": args.signed,
        "complete": complete,
        "generators": cycles,
        "row_witnesses": [format_row_permutation(rows) for _, rows in gens],
        "orbits": listing,
        "group_order": group.order,
        "group_order_at_least": ORDER_CAP if group.overflow else None,
    }
    kind = "signed" if args.signed else "permutation"
    lines = [
        f"problem {problem.name}: {problem.n} variable{'s' * (problem.n != 1)}, "
        f"{problem.m} row{'s' * (problem.m != 1)}"
    ]
    lines.append(f"{kind} symmetries, mode {mode}")
    if not complete:
        lines.append("search budget exceeded: results are incomplete")
    if not perms:
        lines.append("group is trivial")
    else:
        lines.append(f"generators ({len(perms)}):")
        lines.extend(f"  {c}" for c in cycles)
    lines.append("orbits:")
    lines.extend("  {" + ", ".join(cls) + "}" for cls in listing)
    order = f">= {ORDER_CAP}" if group.overflow else str(group.order)
    lines.append(f"group order: {order}")
    _emit(args, payload, lines)
    return EXIT_OK if complete else EXIT_LIMIT


def cmd_improve(args) -> int:
    problem = _load(args)
    seed = _load_solution(args, problem)
    gens, complete = _symmetries(problem, CONSTRAINT_ONLY, args.signed, args.node_budget)
    config = heur.HeurConfig(
        rounds=args.rounds,
        pool_capacity=args.pool,
        symmetry_cap=args.symmetry_cap,
        compose_depth=args.compose_depth,
    )
    best, trace = heur.direct_improve(problem, [seed], [g for g, _ in gens], config)
    stalled = best.objective == seed.objective and bool(gens)
    payload = {
        "problem": problem.name,
        "signed": args.signed,
        "complete": complete,
        "trace": [
            {
                "step": k,
                "x": step.source.bits(),
                "z": _num(step.source.objective),
                "symmetry": format_cycles(step.perm),
                "result": step.image.bits(),
                "result_z": _num(step.image.objective),
            }
            for k, step in enumerate(trace, start=1)
        ],
        "final": {"x": best.bits(), "z": _num(best.objective)},
        "stalled": stalled,
    }
    width = max(problem.n, 1)
    lines = [f"{'Nr':>3}  {'x':<{width}}  {'z':>6}  symmetry"]
    for k, step in enumerate(trace, start=1):
        lines.append(
            f"{k:>3}  {step.source.bits():<{width}}  {_num(step.source.objective):>6}  "
            f"{format_cycles(step.perm)} -> {step.image.bits()} ({_num(step.image.objective)})"
        )
    lines.append(f"{'':>3}  {best.bits():<{width}}  {_num(best.objective):>6}  final")
    if not trace:
        lines.append("no improving symmetry image found")
    if stalled:
        lines.append("direct application stalled; orbit MIPping (orbitmip) may still improve")
    if not complete:
        lines.append("symmetry search budget exceeded: generators are incomplete")
    _emit(args, payload, lines)
    return EXIT_OK if complete else EXIT_LIMIT


def cmd_orbitmip(args) -> int:
    problem = _load(args)
    ref = _load_solution(args, problem)
    gens, complete = _symmetries(problem, CONSTRAINT_ONLY, args.signed, args.node_budget)
    part = orbits([g for g, _ in gens], problem.n, signed=args.signed)
    rows = heur.orbit_rows(ref.values, part)
    result = heur.orbit_mip(problem, ref, part, node_cap=args.node_cap, time_cap=args.time_cap)
    row_text = [format_row(problem, r) for r in rows]
    payload = {
        "problem": problem.name,
        "signed": args.signed,
        "orbits": _orbit_listing(problem, part),
        "added_rows": row_text,
        "status": result.status,
        "nodes": result.nodes,
        "reference": {"x": ref.bits(), "z": _num(ref.objective)},
        "final": {"x": result.best.bits(), "z": _num(result.best.objective)},
    }
    lines = ["added orbit rows:"]
    lines.extend(f"  {r}" for r in row_text)
    if not row_text:
        lines.append("  (none)")
    lines.append(f"status: {result.status} ({result.nodes} nodes)")
    lines.append(f"reference: {ref.bits()}  z = {_num(ref.objective)}")
    lines.append(f"final:     {result.best.bits()}  z = {_num(result.best.objective)}")
    _emit(args, payload, lines)
    if result.status == subsolver.LIMIT_REACHED or not complete:
        return EXIT_LIMIT
    return EXIT_OK


def cmd_lift(args) -> int:
    problem = _load(args)
    lifted = liftsym.lift(problem).problem
    if args.json:
        print(json.dumps(problem_to_json(lifted), indent=2))
    else:
        sys.stdout.write(format_problem(lifted))
    return EXIT_OK


def cmd_check(args) -> int:
    problem = _load(args)
    perm = parse_cycles(args.permutation, problem.n)
    mode = CONSTRAINT_ONLY if args.constraint_only else FULL
    witness = check_symmetry(problem, perm, mode)
    payload = {
        "problem": problem.name,
        "permutation": format_cycles(perm),
        "mode": mode,
        "symmetry": witness is not None,
        "row_permutation": None if witness is None else format_row_permutation(witness),
    }
    if witness is None:
        lines = [f"{format_cycles(perm)} is not a symmetry ({mode})"]
    else:
        rows = "identity" if witness.is_identity else format_row_permutation(witness)
        lines = [f"{format_cycles(perm)} is a symmetry ({mode})", f"row permutation: {rows}"]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = _load(args)
    result = subsolver.solve(problem, node_cap=args.node_cap, time_cap=args.time_cap)
    payload = {
        "problem": problem.name,
        "status": result.status,
        "nodes": result.nodes,
        "objective": None if result.best is None else _num(result.best.objective),
        "x": None if result.best is None else result.best.bits(),
    }
    lines = [f"status: {result.status} ({result.nodes} nodes)"]
    if result.best is not None:
        lines.append(f"objective: {_num(result.best.objective)}")
        lines.append(f"x: {result.best.bits()}")
    _emit(args, payload, lines)
    return EXIT_LIMIT if result.status == subsolver.LIMIT_REACHED else EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signsym",
        description="Permutation and complement (signed) symmetries of binary linear problems.",
        epilog="Cycles are 1-based; '-3' means the complement of x3, e.g. '(1 -2 3)'. "
        "Orbit listings mark complemented literals as '~x3'.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, solution=False):
        p.add_argument("problem", help="problem document (text or JSON)")
        if solution:
            p.add_argument("solution", help="file holding one line of 0/1 characters")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    def budget(p):
        p.add_argument("--node-budget", type=int, default=autom.DEFAULT_NODE_BUDGET,
                       help="automorphism search node budget")

    def limits(p):
        p.add_argument("--node-cap", type=int, default=subsolver.DEFAULT_NODE_CAP)
        p.add_argument("--time-cap", type=float, default=None, help="seconds")

    p = sub.add_parser("detect", help="find symmetry generators, orbits and group order")
    common(p)
    p.add_argument("--constraint-only", action="store_true", help="ignore the objective")
    p.add_argument("--signed", action="store_true", help="include complementing symmetries")
    budget(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("improve", help="direct symmetry improvement heuristic")
    common(p, solution=True)
    p.add_argument("--signed", action="store_true")
    p.add_argument("--rounds", type=_positive_int, default=100)
    p.add_argument("--pool", type=_positive_int, default=10, help="solution pool capacity")
    p.add_argument("--symmetry-cap", type=_positive_int, default=1000)
    p.add_argument("--compose-depth", type=_positive_int, default=2)
    budget(p)
    p.set_defaults(func=cmd_improve)

    p = sub.add_parser("orbitmip", help="re-solve with orbit sums fixed at the reference")
    common(p, solution=True)
    p.add_argument("--signed", action="store_true")
    budget(p)
    limits(p)
    p.set_defaults(func=cmd_orbitmip)

    p = sub.add_parser("lift", help="print the lifted 2n-variable problem")
    common(p)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("check", help="test whether a permutation is a symmetry")
    common(p)
    p.add_argument("permutation", help="cycle notation, e.g. '(1 -2 3)'")
    p.add_argument("--constraint-only", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="exact branch and bound")
    common(p)
    limits(p)
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (InputError, DocumentError, CycleSyntaxError, DimensionError, heur.PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
