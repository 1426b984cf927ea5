import pytest

from helpers import cover6, cube3, make_rng, planted_problem, points, random_problem, square2
from signsym import autom
from signsym.liftsym import (
    LiftConsistencyError,
    NotASymmetry,
    brute_force_signed,
    detect_signed,
    embed,
    extract,
    lift,
)
from signsym.model import (
    CONSTRAINT_ONLY,
    EQ,
    FULL,
    LE,
    BinaryProblem,
    RowPermutation,
    SignedPermutation,
    check_symmetry,
    closure,
    evaluate,
)

ROT = SignedPermutation.from_targets([(1, -1), (2, -1), (0, 1)])
SQUARE_FLIP = SignedPermutation.from_targets([(1, -1), (0, -1)])


def dense(row, n):
    out = [0] * n
    for j, a in row.coefficients:
        out[j] = a
    return out


class TestLift:
    def test_cube3(self):
        lifted = lift(cube3())
        rows = lifted.problem.rows
        assert lifted.problem.n == 6 and len(rows) == 4
        assert rows[0].sense == LE and dense(rows[0], 6) == [1, -1, 1, -1, 1, -1]
        # 2b - Ae = 2 - 1
        assert rows[0].rhs == 1
        for j, row in enumerate(rows[1:]):
            assert row.sense == EQ and row.rhs == 1
            assert [c for c, _ in row.coefficients] == [j, 3 + j]
        assert lifted.problem.objective == (1, -1, 1, -1, 1, -1)

    def test_zero_matrix(self):
        lifted = lift(BinaryProblem.build([1, 1], [([0, 0], "<=", 0)]))
        assert lifted.problem.rows[0].coefficients == () and lifted.problem.rows[0].rhs == 0

    def test_square2(self):
        row = lift(square2()).problem.rows[0]
        assert dense(row, 4) == [-1, 1, 1, -1] and row.rhs == 0
        assert len(lift(square2()).problem.rows) == 3

    def test_eq_rows_keep_sense(self):
        p = BinaryProblem.build([0, 0], [([1, 1], "=", 1)])
        row = lift(p).problem.rows[0]
        assert row.sense == EQ and row.rhs == 2 * 1 - 2

    @pytest.mark.parametrize("seed", range(30))
    def test_equivalence_on_all_points(self, seed):
        rng = make_rng(seed)
        p = random_problem(rng, n_max=6, m_max=4, coefs=(-2, -1, 0, 1, 2), senses=("<=", "=", ">="))
        lifted = lift(p)
        for x in points(p.n):
            xx = lifted.lifted_point(x)
            orig, up = evaluate(p, x), evaluate(lifted.problem, xx)
            assert orig.feasible == up.feasible
            assert lifted.original_objective(xx, p) == orig.objective

    def test_non_complementary_points_infeasible(self):
        lifted = lift(cube3())
        assert not evaluate(lifted.problem, (0, 0, 0, 0, 0, 0)).feasible


class TestExtract:
    def test_identity(self):
        lifted = lift(cube3())
        s, p = extract(lifted, SignedPermutation.identity(6), RowPermutation.identity(4))
        assert s.is_identity and s.offset() == (0, 0, 0) and p.is_identity

    def test_cube3_rotation(self):
        lifted = lift(cube3())
        # (x1 ~x2 x3)(~x1 x2 ~x3) on columns x1..x3, ~x1..~x3
        cols = SignedPermutation.from_perm((4, 5, 0, 1, 2, 3))
        rows = RowPermutation((0, 2, 3, 1))
        s, p = extract(lifted, cols, rows)
        assert s == ROT and s.offset() == (0, 1, 1) and p.is_identity

    def test_square2_flip(self):
        lifted = lift(square2())
        cols = SignedPermutation.from_perm((3, 2, 1, 0))
        s, p = extract(lifted, cols, RowPermutation((0, 2, 1)))
        assert s == SQUARE_FLIP and s.offset() == (1, 1)
        assert check_symmetry(square2(), s, FULL) == p

    def test_broken_block_structure(self):
        lifted = lift(cube3())
        # x1 <-> x2 but ~x1 stays put
        cols = SignedPermutation.from_perm((1, 0, 2, 3, 4, 5))
        with pytest.raises(LiftConsistencyError):
            extract(lifted, cols, RowPermutation.identity(4))


class TestEmbed:
    def test_identity(self):
        p = cube3()
        cols, rows = embed(lift(p), p, SignedPermutation.identity(3), RowPermutation.identity(1))
        assert cols.is_identity and rows.is_identity

    def test_cube3_rotation(self):
        p = cube3()
        cols, rows = embed(lift(p), p, ROT, RowPermutation.identity(1))
        assert cols.perm == (4, 5, 0, 1, 2, 3)
        assert rows.mapping == (0, 2, 3, 1)

    def test_unsigned_is_block_diagonal(self):
        p = cover6()
        g = SignedPermutation.from_perm((2, 1, 0, 3, 4, 5))
        w = check_symmetry(p, g, CONSTRAINT_ONLY)
        cols, _ = embed(lift(p), p, g, w, CONSTRAINT_ONLY)
        assert cols.perm == g.perm + tuple(6 + i for i in g.perm)

    def test_rejects_non_symmetry(self):
        p = cover6()
        with pytest.raises(NotASymmetry):
            embed(lift(p), p, SignedPermutation.from_perm((3, 1, 2, 0, 4, 5)), RowPermutation.identity(6))

    def test_result_is_lifted_automorphism(self):
        p = cube3()
        lifted = lift(p)
        graph = autom.build_graph(lifted.problem, FULL)
        cols, rows = embed(lifted, p, ROT, RowPermutation.identity(1))
        mapping = list(rows.mapping) + [lifted.problem.m + i for i in cols.perm]
        assert autom.is_automorphism(graph, mapping)


class TestDetectSigned:
    def test_cube3(self):
        gens = detect_signed(cube3(), FULL)
        group = closure([g for g, _ in gens], n=3)
        assert group.order == 6 and ROT in group.elements

    def test_square2(self):
        gens = detect_signed(square2(), FULL)
        group = closure([g for g, _ in gens], n=2).elements
        assert group == {SignedPermutation.identity(2), SQUARE_FLIP}

    def test_single_variable_bound(self):
        p = BinaryProblem.build([1], [([1], "<=", 0)])
        assert detect_signed(p, FULL) == []

    def test_outputs_pass_check(self):
        for p in (cube3(), square2(), cover6()):
            for mode in (FULL, CONSTRAINT_ONLY):
                for g, w in detect_signed(p, mode):
                    assert check_symmetry(p, g, mode) is not None

    def test_budget_propagates(self):
        p = BinaryProblem.build([1] * 6, [([1] * 6, "<=", 3)])
        with pytest.raises(autom.SearchBudgetExceeded) as info:
            detect_signed(p, FULL, node_budget=2)
        assert info.value.incomplete

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_oracle(self, seed):
        rng = make_rng(seed)
        p = random_problem(rng, n_max=4, m_max=3, senses=("<=", "="))
        for mode in (FULL, CONSTRAINT_ONLY):
            found = closure([g for g, _ in detect_signed(p, mode)], n=p.n).elements
            assert found == {g for g, _ in brute_force_signed(p, mode)}

    @pytest.mark.parametrize("seed", range(20))
    def test_unsigned_subgroup(self, seed):
        rng = make_rng(500 + seed)
        p, _ = planted_problem(rng, rng.randint(2, 5))
        signed = closure([g for g, _ in detect_signed(p, CONSTRAINT_ONLY)], n=p.n).elements
        unsigned = closure([g for g, _ in autom.detect_unsigned(p, CONSTRAINT_ONLY)], n=p.n).elements
        assert unsigned == {g for g in signed if g.is_unsigned}


class TestBruteForceSigned:
    def test_single_free_variable(self):
        p = BinaryProblem.build([1], [])
        flip = SignedPermutation((0,), (-1,))
        assert {g for g, _ in brute_force_signed(p, CONSTRAINT_ONLY)} == {SignedPermutation.identity(1), flip}
        assert {g for g, _ in brute_force_signed(p, FULL)} == {SignedPermutation.identity(1)}

    def test_square2(self):
        assert len(brute_force_signed(square2(), FULL)) == 2

    def test_empty(self):
        p = BinaryProblem.build([], [])
        assert [g for g, _ in brute_force_signed(p, FULL)] == [SignedPermutation.identity(0)]

    def test_cap(self):
        with pytest.raises(autom.OracleTooLarge):
            brute_force_signed(BinaryProblem.build([0] * 7, []), FULL, cap=1000)


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(20))
    def test_extract_embed(self, seed):
        rng = make_rng(seed)
        p, g = planted_problem(rng, rng.randint(1, 6))
        lifted = lift(p)
        w = check_symmetry(p, g, FULL)
        cols, rows = embed(lifted, p, g, w)
        assert extract(lifted, cols, rows) == (g, w)

    @pytest.mark.parametrize("seed", range(20))
    def test_lifted_automorphisms_keep_blocks(self, seed):
        rng = make_rng(seed)
        p, _ = planted_problem(rng, rng.randint(1, 5))
        lifted = lift(p)
        graph = autom.build_graph(lifted.problem, FULL)
        m = p.m
        for rows, cols in autom.find_generators(graph):
            assert all(r < m for r in rows.mapping[:m])
            assert all(r >= m for r in rows.mapping[m:])
            s, w = extract(lifted, cols, rows)
            assert embed(lifted, p, s, w) == (cols, rows)
