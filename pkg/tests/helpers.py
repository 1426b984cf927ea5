"""Shared instances, random generators and brute-force oracles for the tests."""
import itertools
import random

from signsym.model import (
    BinaryProblem,
    Constraint,
    SignedPermutation,
    evaluate,
    transform_rows,
)

COVER6_C = [1, 2, 3, 3, 1, 2]
COVER6_A = [
    [1, 0, 1, 0, 0, 0],
    [0, 1, 0, 1, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0, 1, 0, 0, 0, 1],
    [0, 0, 1, 0, 1, 0],
    [0, 0, 0, 1, 0, 1],
]


def cover6():
    return BinaryProblem.build(COVER6_C, [(row, ">=", 1) for row in COVER6_A], name="cover6")


def cube3():
    return BinaryProblem.build([1, -1, 1], [([1, -1, 1], "<=", 1)], name="cube3")


def square2():
    # x2 <= x1
    return BinaryProblem.build([1, -1], [({0: -1, 1: 1}, "<=", 0)], name="square2")


def cyc(*cycles, n):
    """Unsigned permutation from 1-based cycles, push convention."""
    images = list(range(n))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            images[a - 1] = b - 1
    return SignedPermutation.from_perm(images)


def cover6_generators():
    return [cyc((1, 3), n=6), cyc((2, 4), n=6), cyc((4, 6), n=6), cyc((1, 2), (3, 4), (5, 6), n=6)]


def points(n):
    return itertools.product((0, 1), repeat=n)


def brute_force_optimum(problem):
    """(optimal value or None, list of optimal points) by full enumeration."""
    best, arg = None, []
    for x in points(problem.n):
        sol = evaluate(problem, x)
        if not sol.feasible:
            continue
        if best is None or sol.objective < best:
            best, arg = sol.objective, [x]
        elif sol.objective == best:
            arg.append(x)
    return best, arg


def random_problem(rng, n_max=5, m_max=4, coefs=(-1, 0, 1), senses=("<=",), rhs=(-1, 0, 1), n_min=1):
    n = rng.randint(n_min, n_max)
    m = rng.randint(0, m_max)
    c = [rng.choice(coefs) for _ in range(n)]
    rows = [([rng.choice(coefs) for _ in range(n)], rng.choice(senses), rng.choice(rhs)) for _ in range(m)]
    return BinaryProblem.build(c, rows)


def random_signed_permutation(rng, n, signed=True):
    perm = list(range(n))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) if signed else 1 for _ in range(n)]
    return SignedPermutation(tuple(perm), tuple(signs))


def planted_problem(rng, n, base_rows=2, signed=True, coefs=(-1, 0, 1, 2)):
    """Random problem closed under a random signed permutation ``g``.

    Rows are closed under the row transformation of ``g`` and the objective
    satisfies Q^T c = c, so ``g`` is a full symmetry.  Returns (problem, g).
    """
    g = random_signed_permutation(rng, n, signed)
    seen = set()
    rows = []
    for _ in range(base_rows):
        coef = [rng.choice(coefs) for _ in range(n)]
        start = BinaryProblem.build([0] * n, [(coef, "<=", rng.choice((0, 1, 2)))])
        current = start
        while current.rows[0].key() not in seen:
            seen.add(current.rows[0].key())
            rows.append(current.rows[0])
            current = BinaryProblem(n, tuple(transform_rows(current, g)), current.objective)
    c = [0] * n
    done = [False] * n
    for j0 in range(n):
        if done[j0]:
            continue
        cycle = [j0]
        while g.perm[cycle[-1]] != j0:
            cycle.append(g.perm[cycle[-1]])
        value = rng.choice((-2, -1, 1, 2))
        vals = {j0: value}
        ok = True
        for j in cycle:
            t = g.perm[j]
            nxt = g.signs[j] * vals[j]
            if t in vals and vals[t] != nxt:
                ok = False
            vals.setdefault(t, nxt)
        for j in cycle:
            c[j] = vals[j] if ok else 0
            done[j] = True
    problem = BinaryProblem.build(c, [])
    problem = BinaryProblem(n, tuple(rows), problem.objective)
    return problem, g


def make_rng(seed):
    return random.Random(seed)
