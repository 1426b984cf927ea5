"""Binary problems, signed permutations and the symmetry conditions linking them.

A signed permutation acts on binary vectors by moving coordinates around and
optionally complementing them.  Entry ``j = (i, s)`` means that the value of
``x[j]`` lands at position ``i`` of the image, complemented when ``s == -1``.
Unsigned permutations are the all-positive special case.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

LE = "<="
EQ = "="
GE = ">="

FULL = "full"
CONSTRAINT_ONLY = "constraint_only"
MODES = (FULL, CONSTRAINT_ONLY)


class DimensionError(ValueError):
    pass


class ModeError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction or decimal text (floats are rejected)."""
    if isinstance(value, float):
        raise TypeError(f"floating point coefficient {value!r}; pass text or Fraction")
    return Fraction(value)


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ModeError(f"unknown mode {mode!r}, expected one of {MODES}")


@dataclass(frozen=True)
class Constraint:
    """One row ``sum(a_j x_j) <sense> rhs`` stored as sorted sparse pairs."""

    coefficients: tuple[tuple[int, Fraction], ...]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in (LE, EQ):
            raise ValueError(f"stored rows must be {LE!r} or {EQ!r}, got {self.sense!r}")
        cols = [j for j, _ in self.coefficients]
        if any(a >= b for a, b in zip(cols, cols[1:])):
            raise ValueError("row column indices must be strictly increasing")
        if any(a == 0 for _, a in self.coefficients):
            raise ValueError("rows must not store explicit zeros")

    def activity(self, values: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for j, a in self.coefficients:
            v = values[j]
            if v:
                total += a if v == 1 else a * v
        return total

    def satisfied(self, values: Sequence[int]) -> bool:
        act = self.activity(values)
        return act <= self.rhs if self.sense == LE else act == self.rhs

    def key(self):
        """Hashable identity used for exact row matching."""
        return (self.sense, self.rhs, self.coefficients)


def make_constraint(coefficients, sense: str, rhs) -> Constraint:
    """Build a canonical row from a ``{col: coef}`` mapping or ``(col, coef)`` pairs.

    Repeated columns are summed, zeros dropped, and ``>=`` rows negated into ``<=``.
    """
    if isinstance(coefficients, Mapping):
        items = coefficients.items()
    else:
        items = coefficients
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for j, a in items:
        acc[int(j)] += as_fraction(a)
    rhs = as_fraction(rhs)
    if sense == GE:
        acc = {j: -a for j, a in acc.items()}
        rhs = -rhs
        sense = LE
    coefs = tuple(sorted((j, a) for j, a in acc.items() if a != 0))
    return Constraint(coefs, sense, rhs)


@dataclass(frozen=True)
class BinaryProblem:
    """``min c.x + offset`` subject to LE/EQ rows over ``x`` in {0,1}^n."""

    n: int
    rows: tuple[Constraint, ...]
    objective: tuple[Fraction, ...]
    objective_offset: Fraction = Fraction(0)
    name: str = "problem"
    var_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("variable count must be non-negative")
        if len(self.objective) != self.n:
            raise DimensionError(f"objective has {len(self.objective)} entries, expected {self.n}")
        for row in self.rows:
            for j, _ in row.coefficients:
                if not 0 <= j < self.n:
                    raise DimensionError(f"column index {j} out of range for n={self.n}")
        if not self.var_names:
            object.__setattr__(self, "var_names", tuple(f"x{j + 1}" for j in range(self.n)))
        elif len(self.var_names) != self.n:
            raise DimensionError("var_names length must equal n")
        if len(set(self.var_names)) != self.n:
            raise ValueError("duplicate variable names")

    @property
    def m(self) -> int:
        return len(self.rows)

    @classmethod
    def build(
        cls,
        objective: Sequence,
        rows: Iterable = (),
        *,
        offset=0,
        name: str = "problem",
        var_names: Sequence[str] = (),
    ) -> "BinaryProblem":
        """Convenience constructor; each row is ``(coefficients, sense, rhs)``.

        Row coefficients may be a dense sequence of length n, a mapping or
        a sequence of ``(col, coef)`` pairs.
        """
        n = len(objective)
        built = []
        for coefs, sense, rhs in rows:
            if not isinstance(coefs, Mapping) and len(coefs) == n and not (
                n and isinstance(coefs[0], tuple)
            ):
                coefs = list(enumerate(coefs))
            built.append(make_constraint(coefs, sense, rhs))
        return cls(
            n=n,
            rows=tuple(built),
            objective=tuple(as_fraction(c) for c in objective),
            objective_offset=as_fraction(offset),
            name=name,
            var_names=tuple(var_names),
        )

    def dense(self) -> list[list[Fraction]]:
        A = [[Fraction(0)] * self.n for _ in self.rows]
        for r, row in enumerate(self.rows):
            for j, a in row.coefficients:
                A[r][j] = a
        return A

    def with_rows(self, extra: Iterable[Constraint], name: str | None = None) -> "BinaryProblem":
        return BinaryProblem(
            self.n,
            self.rows + tuple(extra),
            self.objective,
            self.objective_offset,
            name or self.name,
            self.var_names,
        )


@dataclass(frozen=True)
class Solution:
    values: tuple[int, ...]
    objective: Fraction
    feasible: bool

    def bits(self) -> str:
        return "".join(str(v) for v in self.values)


def _check_bits(values: Sequence[int], n: int) -> tuple[int, ...]:
    if len(values) != n:
        raise DimensionError(f"expected {n} values, got {len(values)}")
    values = tuple(int(v) for v in values)
    if any(v not in (0, 1) for v in values):
        raise ValueError("values must be binary")
    return values


def objective_value(problem: BinaryProblem, values: Sequence[int]) -> Fraction:
    """c.x + offset for a 0/1 vector, without feasibility checks."""
    return problem.objective_offset + sum(
        (c for c, v in zip(problem.objective, values) if v), Fraction(0)
    )


def evaluate(problem: BinaryProblem, values: Sequence[int]) -> Solution:
    values = _check_bits(values, problem.n)
    obj = objective_value(problem, values)
    feasible = all(row.satisfied(values) for row in problem.rows)
    return Solution(values, obj, feasible)


def slacks(problem: BinaryProblem, values: Sequence[int]) -> tuple[Fraction, ...]:
    """Per-row ``b - Ax``."""
    return tuple(row.rhs - row.activity(values) for row in problem.rows)


@dataclass(frozen=True)
class SignedPermutation:
    """Signed permutation stored as per-variable target index and sign."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.perm) != len(self.signs):
            raise DimensionError("perm and signs must have equal length")
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"targets are not a bijection: {self.perm}")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(n)), (1,) * n)

    @classmethod
    def from_perm(cls, images: Sequence[int]) -> "SignedPermutation":
        return cls(tuple(images), (1,) * len(images))

    @classmethod
    def from_targets(cls, targets: Iterable[tuple[int, int]]) -> "SignedPermutation":
        targets = list(targets)
        return cls(tuple(i for i, _ in targets), tuple(s for _, s in targets))

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def targets(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.perm, self.signs))

    @property
    def is_unsigned(self) -> bool:
        return all(s == 1 for s in self.signs)

    @property
    def is_identity(self) -> bool:
        return self.is_unsigned and all(i == j for j, i in enumerate(self.perm))

    def matrix(self) -> list[list[int]]:
        """Q with ``Q[i][j] = s`` for entry ``j = (i, s)``, so that ``y = Qx + q``."""
        Q = [[0] * self.n for _ in range(self.n)]
        for j, (i, s) in enumerate(self.targets):
            Q[i][j] = s
        return Q

    def offset(self) -> tuple[int, ...]:
        """q = (e - Qe)/2: one exactly where the image coordinate is complemented."""
        q = [0] * self.n
        for i, s in self.targets:
            if s == -1:
                q[i] = 1
        return tuple(q)

    def literal_image(self, var: int, negated: bool = False) -> tuple[int, bool]:
        i, s = self.perm[var], self.signs[var]
        return i, negated != (s == -1)


def apply(perm: SignedPermutation, values: Sequence[int]) -> tuple[int, ...]:
    values = _check_bits(values, perm.n)
    y = [0] * perm.n
    for j, (i, s) in enumerate(perm.targets):
        y[i] = values[j] if s == 1 else 1 - values[j]
    return tuple(y)


def compose(outer: SignedPermutation, inner: SignedPermutation) -> SignedPermutation:
    """The map ``x -> outer(inner(x))``."""
    if outer.n != inner.n:
        raise DimensionError(f"cannot compose sizes {outer.n} and {inner.n}")
    perm = tuple(outer.perm[i] for i in inner.perm)
    signs = tuple(s * outer.signs[i] for i, s in zip(inner.perm, inner.signs))
    return SignedPermutation(perm, signs)


def inverse(perm: SignedPermutation) -> SignedPermutation:
    inv = [0] * perm.n
    sg = [1] * perm.n
    for j, (i, s) in enumerate(perm.targets):
        inv[i] = j
        sg[i] = s
    return SignedPermutation(tuple(inv), tuple(sg))


@dataclass(frozen=True)
class RowPermutation:
    """Row map: ``mapping[k]`` is the row that original row ``k`` is sent to."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"row mapping is not a bijection: {self.mapping}")

    @classmethod
    def identity(cls, m: int) -> "RowPermutation":
        return cls(tuple(range(m)))

    @property
    def m(self) -> int:
        return len(self.mapping)

    @property
    def is_identity(self) -> bool:
        return all(i == k for k, i in enumerate(self.mapping))

    def push(self, vector: Sequence) -> tuple:
        """Entry ``k`` of ``vector`` lands at position ``mapping[k]``."""
        out = [None] * self.m
        for k, i in enumerate(self.mapping):
            out[i] = vector[k]
        return tuple(out)


def _transformed_keys(problem: BinaryProblem, perm: SignedPermutation) -> list[tuple]:
    if perm.n != problem.n:
        raise DimensionError(f"permutation size {perm.n} != problem size {problem.n}")
    pre_perm = [0] * perm.n
    pre_sign = [1] * perm.n
    for j, i in enumerate(perm.perm):
        pre_perm[i] = j
        pre_sign[i] = perm.signs[j]
    keys = []
    for row in problem.rows:
        coefs = []
        rhs = row.rhs
        for i, a in row.coefficients:
            if pre_sign[i] == 1:
                coefs.append((pre_perm[i], a))
            else:
                coefs.append((pre_perm[i], -a))
                rhs -= a
        coefs.sort()
        keys.append((row.sense, rhs, tuple(coefs)))
    return keys


def transform_rows(problem: BinaryProblem, perm: SignedPermutation) -> list[Constraint]:
    """Rows of ``A(Qx + q) <sense> b`` rewritten as rows in ``x``: ``(AQ)x <sense> b - Aq``."""
    return [Constraint(coefs, sense, rhs) for sense, rhs, coefs in _transformed_keys(problem, perm)]


def preserves_objective(problem: BinaryProblem, perm: SignedPermutation) -> bool:
    """Q^T c = c."""
    c = problem.objective
    return all(c[i] * s == c[j] for j, (i, s) in enumerate(perm.targets))


def check_symmetry(
    problem: BinaryProblem, perm: SignedPermutation, mode: str = FULL
) -> RowPermutation | None:
    """Witnessing row permutation if ``perm`` is a symmetry of ``problem``, else None.

    ``constraint_only`` skips the objective condition.  The witness maps
    original row ``k`` to the row ``r`` whose transformed version equals row ``k``,
    so the slack vector of ``apply(perm, x)`` is the witness pushed over the
    slack vector of ``x``.
    """
    _check_mode(mode)
    if perm.n != problem.n:
        raise DimensionError(f"permutation size {perm.n} != problem size {problem.n}")
    if mode == FULL and not preserves_objective(problem, perm):
        return None
    transformed = sorted((key, r) for r, key in enumerate(_transformed_keys(problem, perm)))
    original = sorted((row.key(), k) for k, row in enumerate(problem.rows))
    mapping = [0] * problem.m
    for (tkey, r), (okey, k) in zip(transformed, original):
        if tkey != okey:
            return None
        mapping[k] = r
    return RowPermutation(tuple(mapping))


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins so representatives are class minima
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self) -> list[tuple[int, ...]]:
        groups: dict[int, list[int]] = defaultdict(list)
        for x in range(len(self.parent)):
            groups[self.find(x)].append(x)
        return [tuple(g) for _, g in sorted(groups.items())]


@dataclass(frozen=True)
class OrbitPartition:
    n: int
    classes: tuple[tuple[int, ...], ...]

    @property
    def representatives(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.classes)

    def class_of(self, j: int) -> tuple[int, ...]:
        for c in self.classes:
            if j in c:
                return c
        raise IndexError(j)


class Literal(NamedTuple):
    var: int
    negated: bool = False

    def complement(self) -> "Literal":
        return Literal(self.var, not self.negated)


@dataclass(frozen=True)
class SignedOrbitPartition:
    """Partition of the 2n literals; class order follows the smallest literal."""

    n: int
    classes: tuple[tuple[Literal, ...], ...]

    def mirror(self, cls: Sequence[Literal]) -> tuple[Literal, ...]:
        return tuple(sorted(l.complement() for l in cls))

    def is_vacuous(self, cls: Sequence[Literal]) -> bool:
        """A class holding some variable together with its own complement."""
        return len({l.var for l in cls}) < len(cls)

    def representatives(self) -> list[tuple[Literal, ...]]:
        """One class per mirror pair (self-mirrored classes appear once)."""
        seen = set()
        out = []
        for cls in self.classes:
            if cls in seen:
                continue
            seen.add(cls)
            seen.add(self.mirror(cls))
            out.append(cls)
        return out


def orbits(
    generators: Iterable[SignedPermutation], n: int, signed: bool = False
) -> OrbitPartition | SignedOrbitPartition:
    generators = list(generators)
    for g in generators:
        if g.n != n:
            raise DimensionError(f"generator size {g.n} != {n}")
        if not signed and not g.is_unsigned:
            raise ModeError("signed generator passed to unsigned orbit computation")
    if not signed:
        uf = _UnionFind(n)
        for g in generators:
            for j, i in enumerate(g.perm):
                uf.union(j, i)
        return OrbitPartition(n, tuple(uf.classes()))
    # literal (j, pos) -> j, (j, neg) -> n + j
    uf = _UnionFind(2 * n)
    for g in generators:
        for j, (i, s) in enumerate(g.targets):
            if s == 1:
                uf.union(j, i)
                uf.union(n + j, n + i)
            else:
                uf.union(j, n + i)
                uf.union(n + j, i)
    classes = [
        tuple(sorted(Literal(x % n, x >= n) for x in c)) for c in uf.classes()
    ]
    classes.sort()
    return SignedOrbitPartition(n, tuple(classes))


class GroupClosure(NamedTuple):
    elements: frozenset
    overflow: bool

    @property
    def order(self) -> int | None:
        return None if self.overflow else len(self.elements)


def closure(
    generators: Iterable[SignedPermutation], cap: int = 10**5, n: int | None = None
) -> GroupClosure:
    """Breadth-first product closure; stops with ``overflow=True`` past ``cap`` elements."""
    generators = list(generators)
    if n is None:
        if not generators:
            raise DimensionError("n is required when there are no generators")
        n = generators[0].n
    if any(g.n != n for g in generators):
        raise DimensionError("generators of different sizes")
    ident = SignedPermutation.identity(n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in generators:
                k = compose(g, h)
                if k not in seen:
                    if len(seen) >= cap:
                        return GroupClosure(frozenset(seen), True)
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return GroupClosure(frozenset(seen), False)
