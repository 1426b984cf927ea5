"""Complement symmetries through the lifted 2n-variable problem.

Every variable ``x_j`` gets a partner column ``~x_j`` (index ``n + j``) tied
to it by ``x_j + ~x_j = 1``.  Ordinary permutation symmetries of the lifted
problem correspond one-to-one to signed symmetries of the original, so the
unsigned engine in :mod:`signsym.autom` finds the signed group.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import autom
from .model import (
    EQ,
    FULL,
    BinaryProblem,
    Constraint,
    DimensionError,
    RowPermutation,
    SignedPermutation,
    check_symmetry,
    transform_rows,
)


class LiftConsistencyError(RuntimeError):
    """A lifted automorphism lacks the block structure every true one has."""


class NotASymmetry(ValueError):
    pass


@dataclass(frozen=True)
class LiftedProblem:
    problem: BinaryProblem
    origin_n: int
    origin_m: int

    def lifted_point(self, values: Sequence[int]) -> tuple[int, ...]:
        return tuple(values) + tuple(1 - v for v in values)

    def original_objective(self, lifted_values: Sequence[int], origin: BinaryProblem) -> Fraction:
        """Undo the dropped normalization: ``((c,-c).(x,~x) + c.e)/2 + offset``."""
        raw = sum(
            (c * v for c, v in zip(self.problem.objective, lifted_values)), Fraction(0)
        )
        return (raw + sum(origin.objective, Fraction(0))) / 2 + origin.objective_offset


def lift(problem: BinaryProblem) -> LiftedProblem:
    """Materialize the lifted problem.

    Source rows keep their sense: ``(A, -A)(x, ~x) <sense> 2b - Ae``.  They are
    followed by the n link rows ``x_j + ~x_j = 1``.  The objective is ``(c, -c)``
    with the constant ``c.e`` and the factor 1/2 dropped.
    """
    n = problem.n
    rows = []
    for row in problem.rows:
        coefs = tuple(row.coefficients) + tuple((n + j, -a) for j, a in row.coefficients)
        total = sum((a for _, a in row.coefficients), Fraction(0))
        rows.append(Constraint(coefs, row.sense, 2 * row.rhs - total))
    for j in range(n):
        rows.append(Constraint(((j, Fraction(1)), (n + j, Fraction(1))), EQ, Fraction(1)))
    objective = tuple(problem.objective) + tuple(-c for c in problem.objective)
    names = tuple(problem.var_names) + tuple("~" + v for v in problem.var_names)
    lifted = BinaryProblem(
        2 * n, tuple(rows), objective, Fraction(0), problem.name + "_lifted", names
    )
    return LiftedProblem(lifted, n, problem.m)


def extract(
    lifted: LiftedProblem, col_perm: SignedPermutation, row_perm: RowPermutation
) -> tuple[SignedPermutation, RowPermutation]:
    """Signed symmetry of the original problem from a lifted automorphism.

    The block structure (x-block and complement-block moving together, link
    rows following their variables, source rows staying among source rows)
    is verified rather than assumed.
    """
    n, m = lifted.origin_n, lifted.origin_m
    if col_perm.n != 2 * n or row_perm.m != m + n:
        raise DimensionError("automorphism does not match the lifted problem size")
    if not col_perm.is_unsigned:
        raise LiftConsistencyError("lifted column map must be an ordinary permutation")
    targets = []
    for j in range(n):
        t, tbar = col_perm.perm[j], col_perm.perm[n + j]
        if t < n:
            i, s, expected = t, 1, n + t
        else:
            i, s, expected = t - n, -1, t - n
        if tbar != expected:
            raise LiftConsistencyError(
                f"column {j} and its complement are not mapped to complementary columns"
            )
        if row_perm.mapping[m + j] != m + i:
            raise LiftConsistencyError(f"link row of variable {j} does not follow the variable")
        targets.append((i, s))
    head = row_perm.mapping[:m]
    if any(r >= m for r in head):
        raise LiftConsistencyError("a source row was mapped onto a link row")
    return SignedPermutation.from_targets(targets), RowPermutation(tuple(head))


def is_witness(problem: BinaryProblem, perm: SignedPermutation, row_perm: RowPermutation) -> bool:
    """Does ``row_perm`` send each row onto a transformed copy of itself?"""
    if row_perm.m != problem.m:
        return False
    transformed = transform_rows(problem, perm)
    return all(
        transformed[r].key() == row.key() for row, r in zip(problem.rows, row_perm.mapping)
    )


def embed(
    lifted: LiftedProblem,
    origin: BinaryProblem,
    signed: SignedPermutation,
    row_perm: RowPermutation,
    mode: str = FULL,
) -> tuple[SignedPermutation, RowPermutation]:
    """Lifted (column, row) automorphism built from a signed symmetry of ``origin``."""
    n, m = lifted.origin_n, lifted.origin_m
    if signed.n != n or row_perm.m != m:
        raise DimensionError("symmetry does not match the original problem size")
    if check_symmetry(origin, signed, mode) is None or not is_witness(origin, signed, row_perm):
        raise NotASymmetry("input pair is not a symmetry of the original problem")
    cols = [0] * (2 * n)
    for j, (i, s) in enumerate(signed.targets):
        if s == 1:
            cols[j], cols[n + j] = i, n + i
        else:
            cols[j], cols[n + j] = n + i, i
    rows = list(row_perm.mapping) + [m + i for i in signed.perm]
    return SignedPermutation.from_perm(cols), RowPermutation(tuple(rows))


def detect_signed(
    problem: BinaryProblem, mode: str = FULL, node_budget: int = autom.DEFAULT_NODE_BUDGET
) -> list[tuple[SignedPermutation, RowPermutation]]:
    """Generators of the signed symmetry group with their row witnesses."""
    lifted = lift(problem)
    graph = autom.build_graph(lifted.problem, mode)

    def translate(gens):
        out = []
        for rows, cols in gens:
            signed, witness = extract(lifted, cols, rows)
            if check_symmetry(problem, signed, mode) is None:
                raise LiftConsistencyError(f"extracted map {signed.targets} fails the symmetry check")
            out.append((signed, witness))
        return out

    try:
        gens = autom.find_generators(graph, node_budget)
    except autom.SearchBudgetExceeded as exc:
        raise autom.SearchBudgetExceeded(str(exc), translate(exc.generators)) from None
    return translate(gens)


def all_signed_permutations(n: int):
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            yield SignedPermutation(perm, signs)


def brute_force_signed(
    problem: BinaryProblem, mode: str = FULL, cap: int = 10**6
) -> list[tuple[SignedPermutation, RowPermutation]]:
    """All signed symmetries, by checking each of the ``2^n n!`` candidates."""
    n = problem.n
    if 2**n * math.factorial(n) > cap:
        raise autom.OracleTooLarge(f"2^{n} * {n}! candidates exceed cap {cap}")
    found = []
    for perm in all_signed_permutations(n):
        witness = check_symmetry(problem, perm, mode)
        if witness is not None:
            found.append((perm, witness))
    return found
