"""Exact depth-first branch and bound for small pure-binary problems.

No LP relaxation: nodes are bounded by the fixed objective part plus every
still-helpful negative coefficient, and rows are propagated on min/max
activity.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import EQ, BinaryProblem, Solution, evaluate

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
LIMIT_REACHED = "limit_reached"

DEFAULT_NODE_CAP = 10**7


class InfeasibleIncumbent(ValueError):
    pass


@dataclass
class SolveResult:
    status: str
    best: Optional[Solution]
    nodes: int


class PartialAssignment:
    """Variable states (None = free) with cached per-row activity bounds."""

    def __init__(self, problem: BinaryProblem):
        self.problem = problem
        self.values: list[Optional[int]] = [None] * problem.n
        self.min_act = []
        self.max_act = []
        self.col_rows: list[list[tuple[int, Fraction]]] = [[] for _ in range(problem.n)]
        for r, row in enumerate(problem.rows):
            lo = hi = Fraction(0)
            for j, a in row.coefficients:
                self.col_rows[j].append((r, a))
                if a < 0:
                    lo += a
                else:
                    hi += a
            self.min_act.append(lo)
            self.max_act.append(hi)

    def copy(self) -> "PartialAssignment":
        other = object.__new__(PartialAssignment)
        other.problem = self.problem
        other.col_rows = self.col_rows
        other.values = list(self.values)
        other.min_act = list(self.min_act)
        other.max_act = list(self.max_act)
        return other

    def fix(self, j: int, value: int) -> None:
        if self.values[j] is not None:
            raise ValueError(f"variable {j} already fixed")
        self.values[j] = value
        for r, a in self.col_rows[j]:
            if a > 0:
                if value:
                    self.min_act[r] += a
                else:
                    self.max_act[r] -= a
            else:
                if value:
                    self.max_act[r] += a
                else:
                    self.min_act[r] -= a

    def row_conflict(self, r: int) -> bool:
        row = self.problem.rows[r]
        if self.min_act[r] > row.rhs:
            return True
        return row.sense == EQ and self.max_act[r] < row.rhs

    def recompute(self) -> tuple[list[Fraction], list[Fraction]]:
        """Activity bounds from scratch (used to check the cache)."""
        lo_all, hi_all = [], []
        for row in self.problem.rows:
            lo = hi = Fraction(0)
            for j, a in row.coefficients:
                v = self.values[j]
                if v is None:
                    lo += min(a, 0)
                    hi += max(a, 0)
                else:
                    lo += a * v
                    hi += a * v
            lo_all.append(lo)
            hi_all.append(hi)
        return lo_all, hi_all


def _forced_value(assign: PartialAssignment, r: int, a: Fraction) -> Optional[int]:
    """Value a free variable with coefficient ``a`` must take for row ``r``, if any."""
    row = assign.problem.rows[r]
    lo, hi = assign.min_act[r], assign.max_act[r]
    # min activity if the variable is set to 1 / to 0
    lo1 = lo + a if a > 0 else lo
    lo0 = lo if a > 0 else lo - a
    bad1 = lo1 > row.rhs
    bad0 = lo0 > row.rhs
    if row.sense == EQ:
        hi1 = hi if a > 0 else hi + a
        hi0 = hi - a if a > 0 else hi
        bad1 = bad1 or hi1 < row.rhs
        bad0 = bad0 or hi0 < row.rhs
    if bad1 and not bad0:
        return 0
    if bad0 and not bad1:
        return 1
    return None


def propagate(
    problem: BinaryProblem, assignment: PartialAssignment
) -> tuple[list[tuple[int, int]], bool]:
    """Activity-bound propagation to a fixpoint, modifying ``assignment`` in place.

    Returns the fixings made, in order, and whether a conflict was found.
    """
    fixings = []
    queue = list(range(problem.m))
    queued = [True] * problem.m
    while queue:
        r = queue.pop()
        queued[r] = False
        if assignment.row_conflict(r):
            return fixings, True
        for j, a in problem.rows[r].coefficients:
            if assignment.values[j] is not None:
                continue
            value = _forced_value(assignment, r, a)
            if value is None:
                continue
            assignment.fix(j, value)
            fixings.append((j, value))
            for r2, _ in assignment.col_rows[j]:
                if not queued[r2]:
                    queued[r2] = True
                    queue.append(r2)
            if assignment.row_conflict(r):
                return fixings, True
    return fixings, False


class _BranchAndBound:
    def __init__(self, problem, incumbent, node_cap, time_cap):
        self.problem = problem
        self.best = incumbent
        self.node_cap = node_cap
        self.deadline = None if time_cap is None else time.monotonic() + time_cap
        self.nodes = 0
        self.hit_limit = False
        c = problem.objective
        self.order = sorted(range(problem.n), key=lambda j: (-abs(c[j]), j))

    def bound(self, assign: PartialAssignment) -> Fraction:
        total = self.problem.objective_offset
        for j, c in enumerate(self.problem.objective):
            v = assign.values[j]
            if v is None:
                if c < 0:
                    total += c
            elif v:
                total += c
        return total

    def run(self) -> None:
        root = PartialAssignment(self.problem)
        _, conflict = propagate(self.problem, root)
        if not conflict:
            self._node(root)

    def _node(self, assign: PartialAssignment) -> None:
        if self.hit_limit:
            return
        self.nodes += 1
        if self.nodes > self.node_cap or (
            self.deadline is not None and time.monotonic() > self.deadline
        ):
            self.hit_limit = True
            return
        if self.best is not None and self.bound(assign) >= self.best.objective:
            return
        branch = next((j for j in self.order if assign.values[j] is None), None)
        if branch is None:
            sol = evaluate(self.problem, assign.values)
            if sol.feasible and (self.best is None or sol.objective < self.best.objective):
                self.best = sol
            return
        first = 1 if self.problem.objective[branch] < 0 else 0
        for value in (first, 1 - first):
            child = assign.copy()
            child.fix(branch, value)
            _, conflict = propagate(self.problem, child)
            if not conflict:
                self._node(child)


def solve(
    problem: BinaryProblem,
    incumbent: Optional[Solution] = None,
    node_cap: int = DEFAULT_NODE_CAP,
    time_cap: Optional[float] = None,
) -> SolveResult:
    """Exact minimum of ``problem``; a feasible ``incumbent`` warm-starts the search."""
    if incumbent is not None:
        incumbent = evaluate(problem, incumbent.values)
        if not incumbent.feasible:
            raise InfeasibleIncumbent("warm start solution is infeasible")
    bb = _BranchAndBound(problem, incumbent, node_cap, time_cap)
    bb.run()
    if bb.hit_limit:
        return SolveResult(LIMIT_REACHED, bb.best, bb.nodes)
    if bb.best is None:
        return SolveResult(INFEASIBLE, None, bb.nodes)
    return SolveResult(OPTIMAL, bb.best, bb.nodes)
