"""Primal improvement heuristics driven by (constraint) symmetries.

``direct_improve`` pushes incumbents through group elements: images of a
feasible point under a constraint symmetry are feasible, so only the
objective needs checking.  ``orbit_mip`` instead fixes the (signed) sum of
every orbit at its value in a reference solution and re-solves exactly.
"""
from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from . import subsolver
from .model import (
    CONSTRAINT_ONLY,
    EQ,
    BinaryProblem,
    Constraint,
    DimensionError,
    OrbitPartition,
    SignedOrbitPartition,
    SignedPermutation,
    Solution,
    apply,
    check_symmetry,
    compose,
    evaluate,
    objective_value,
)

log = logging.getLogger(__name__)


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class HeurConfig:
    rounds: int = 100
    pool_capacity: int = 10
    symmetry_cap: int = 1000
    compose_depth: int = 2

    def __post_init__(self):
        for name in ("rounds", "pool_capacity", "symmetry_cap", "compose_depth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class SolutionPool:
    """Best-K distinct feasible solutions, ascending by objective."""

    def __init__(self, capacity: int = 10):
        self.capacity = capacity
        self._entries: list[Solution] = []
        self._keys: list = []
        self._seen: set = set()

    def add(self, sol: Solution) -> bool:
        if not sol.feasible:
            raise PreconditionError("solution pool only holds feasible solutions")
        if sol.values in self._seen:
            return False
        key = (sol.objective, sol.values)
        pos = bisect.bisect(self._keys, key)
        if pos >= self.capacity:
            return False
        self._keys.insert(pos, key)
        self._entries.insert(pos, sol)
        self._seen.add(sol.values)
        if len(self._entries) > self.capacity:
            dropped = self._entries.pop()
            self._keys.pop()
            self._seen.discard(dropped.values)
        return True

    @property
    def best(self) -> Solution:
        return self._entries[0]

    def __iter__(self):
        return iter(list(self._entries))

    def __len__(self):
        return len(self._entries)


class SymmetryPool:
    """Deduplicated non-identity permutations, grown by pairwise products."""

    def __init__(self, generators: Iterable[SignedPermutation], cap: int = 1000):
        self.cap = cap
        self._perms: list[SignedPermutation] = []
        self._seen: set = set()
        for g in generators:
            self.add(g)

    def add(self, perm: SignedPermutation) -> bool:
        if perm.is_identity or perm in self._seen or len(self._perms) >= self.cap:
            return False
        self._perms.append(perm)
        self._seen.add(perm)
        return True

    def grow(self) -> int:
        """Add every product ``a * b`` of current members; returns how many were new."""
        current = list(self._perms)
        added = 0
        for a in current:
            for b in current:
                if len(self._perms) >= self.cap:
                    return added
                added += self.add(compose(a, b))
        return added

    def __iter__(self):
        return iter(list(self._perms))

    def __len__(self):
        return len(self._perms)

    def __contains__(self, perm):
        return perm in self._seen


class ImprovementStep(NamedTuple):
    perm: SignedPermutation
    source: Solution
    image: Solution


def direct_improve(
    problem: BinaryProblem,
    seeds: Iterable[Solution | Sequence[int]],
    generators: Iterable[SignedPermutation],
    config: HeurConfig = HeurConfig(),
) -> tuple[Solution, list[ImprovementStep]]:
    """Improve seeds by applying constraint symmetries; returns (best, trace).

    A round applies every pooled permutation to every pooled solution and keeps
    images strictly better than their source.  A round without improvement
    grows the symmetry pool by products, at most ``compose_depth`` times.
    """
    seeds = [evaluate(problem, s.values if isinstance(s, Solution) else s) for s in seeds]
    if not seeds:
        raise PreconditionError("at least one seed solution is required")
    for s in seeds:
        if not s.feasible:
            raise PreconditionError(f"seed {s.bits()} is infeasible")
    generators = list(generators)
    for g in generators:
        if check_symmetry(problem, g, CONSTRAINT_ONLY) is None:
            raise PreconditionError(f"{g.targets} is not a constraint symmetry")

    pool = SolutionPool(config.pool_capacity)
    for s in seeds:
        pool.add(s)
    syms = SymmetryPool(generators, config.symmetry_cap)
    trace: list[ImprovementStep] = []
    growths = 0
    for _ in range(config.rounds):
        improved = False
        for sol in pool:
            for g in syms:
                values = apply(g, sol.values)
                # images of feasible points are feasible, only the objective matters
                if objective_value(problem, values) >= sol.objective:
                    continue
                image = evaluate(problem, values)
                assert image.feasible, "constraint symmetry produced an infeasible image"
                if pool.add(image):
                    trace.append(ImprovementStep(g, sol, image))
                    improved = True
        if improved:
            continue
        if growths >= config.compose_depth or syms.grow() == 0:
            break
        growths += 1
    return pool.best, trace


def _reference_values(problem: BinaryProblem, reference) -> Solution:
    ref = evaluate(problem, reference.values if isinstance(reference, Solution) else reference)
    if not ref.feasible:
        raise PreconditionError(f"reference {ref.bits()} is infeasible")
    return ref


def orbit_rows(
    reference: Sequence[int], partition: OrbitPartition | SignedOrbitPartition
) -> list[Constraint]:
    """One equality per orbit fixing its (signed) sum at the reference value."""
    rows = []
    if isinstance(partition, OrbitPartition):
        for cls in partition.classes:
            coefs = tuple((j, Fraction(1)) for j in cls)
            rows.append(Constraint(coefs, EQ, Fraction(sum(reference[j] for j in cls))))
        return rows
    for cls in partition.representatives():
        if partition.is_vacuous(cls):
            log.info("skipping orbit %s: contains a literal and its complement", cls)
            continue
        coefs = []
        rhs = 0
        for lit in cls:
            if lit.negated:
                coefs.append((lit.var, Fraction(-1)))
                rhs += (1 - reference[lit.var]) - 1
            else:
                coefs.append((lit.var, Fraction(1)))
                rhs += reference[lit.var]
        rows.append(Constraint(tuple(sorted(coefs)), EQ, Fraction(rhs)))
    return rows


def build_orbit_subproblem(
    problem: BinaryProblem, reference, partition: OrbitPartition | SignedOrbitPartition
) -> BinaryProblem:
    if partition.n != problem.n:
        raise DimensionError(f"partition covers {partition.n} variables, problem has {problem.n}")
    ref = _reference_values(problem, reference)
    return problem.with_rows(orbit_rows(ref.values, partition), name=problem.name + "_orbits")


def orbit_mip(
    problem: BinaryProblem,
    reference,
    partition: OrbitPartition | SignedOrbitPartition,
    node_cap: int = subsolver.DEFAULT_NODE_CAP,
    time_cap: float | None = None,
) -> subsolver.SolveResult:
    """Solve the orbit-restricted problem warm-started at ``reference``.

    ``result.best`` is evaluated on the original problem; on a limit the
    status is ``limit_reached`` and ``best`` is the incumbent found so far.
    """
    sub = build_orbit_subproblem(problem, reference, partition)
    ref = _reference_values(problem, reference)
    result = subsolver.solve(sub, incumbent=ref, node_cap=node_cap, time_cap=time_cap)
    best = evaluate(problem, result.best.values)
    return subsolver.SolveResult(result.status, best, result.nodes)
