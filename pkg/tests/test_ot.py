import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment, linprog

from tokenmorph import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidWeightsError,
    TokenSet,
    brute_force_ot_uniform,
    cost_matrix,
    solve_assignment,
    solve_exact_ot,
    sorted_1d_ot,
    w2_distance,
)

from conftest import random_tokenset


class TestCostMatrix:
    def test_single_pair(self):
        cm = cost_matrix(TokenSet([[0.0, 0.0]]), TokenSet([[3.0, 4.0]]))
        np.testing.assert_array_equal(cm.values, [[25.0]])

    def test_direct_arithmetic(self):
        cm = cost_matrix(TokenSet([[0.0], [1.0]]), TokenSet([[3.0], [5.0]]))
        np.testing.assert_array_equal(cm.values, [[9.0, 25.0], [4.0, 16.0]])

    def test_self_cost_is_symmetric_with_zero_diagonal(self):
        rng = np.random.default_rng(0)
        ts = random_tokenset(rng, 6, 3)
        cm = cost_matrix(ts, ts)
        np.testing.assert_array_equal(np.diag(cm.values), np.zeros(6))
        np.testing.assert_allclose(cm.values, cm.values.T, atol=1e-12)

    def test_values_nonnegative(self):
        rng = np.random.default_rng(1)
        cm = cost_matrix(random_tokenset(rng, 5, 4), random_tokenset(rng, 7, 4))
        assert cm.values.min() >= 0.0
        assert cm.metric == "sqeuclidean"

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            cost_matrix(TokenSet([[0.0]]), TokenSet([[0.0, 1.0]]))


class TestSolveExactOT:
    def test_identical_single_diracs(self):
        plan = solve_exact_ot(TokenSet([[1.0, 2.0]]), TokenSet([[1.0, 2.0]]))
        np.testing.assert_array_equal(plan.coupling, [[1.0]])
        assert plan.total_cost == 0.0

    def test_1d_derived_example(self):
        # Brute force over both permutations: identity costs (9+16)/2 = 12.5,
        # the swap (25+4)/2 = 14.5, so the optimum matches 0->3, 1->5.
        plan = solve_exact_ot(TokenSet([[0.0], [1.0]]), TokenSet([[3.0], [5.0]]))
        assert plan.total_cost == pytest.approx(12.5, rel=1e-12)
        np.testing.assert_array_equal(plan.coupling, [[0.5, 0.0], [0.0, 0.5]])

    def test_forced_coupling_to_single_atom(self):
        plan = solve_exact_ot(TokenSet([[0.0], [1.0]]), TokenSet([[5.0]]))
        np.testing.assert_array_equal(plan.coupling, [[0.5], [0.5]])

    def test_unknown_method_rejected(self):
        a = TokenSet([[0.0]])
        with pytest.raises(InvalidParameterError):
            solve_exact_ot(a, a, method="magic")

    def test_assignment_method_requires_uniform_equal(self):
        a = TokenSet([[0.0], [1.0]])
        with pytest.raises(DimensionMismatchError):
            solve_exact_ot(a, TokenSet([[5.0]]), method="assignment")
        skewed = TokenSet([[0.0], [1.0]], [0.25, 0.75])
        with pytest.raises(InvalidWeightsError):
            solve_exact_ot(a, skewed, method="assignment")

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(2, 7),
        st.integers(1, 5),
        st.integers(0, 10_000),
    )
    def test_oracle_equivalence_both_paths(self, n, m, seed):
        rng = np.random.default_rng(seed)
        a = random_tokenset(rng, n, m)
        b = random_tokenset(rng, n, m)
        reference = brute_force_ot_uniform(a, b)
        for method in ("auto", "simplex", "assignment"):
            got = solve_exact_ot(a, b, method=method).total_cost
            assert got == pytest.approx(reference, rel=1e-9)

    def test_1d_equivalence_up_to_n64(self):
        rng = np.random.default_rng(7)
        for n in (2, 5, 16, 33, 64):
            a = random_tokenset(rng, n, 1, scale=3.0)
            b = random_tokenset(rng, n, 1, scale=3.0)
            reference = sorted_1d_ot(a, b)
            assert solve_exact_ot(a, b).total_cost == pytest.approx(reference, rel=1e-9)
            assert solve_exact_ot(a, b, method="simplex").total_cost == pytest.approx(
                reference, rel=1e-9
            )

    def test_marginals_feasible(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            n, n2, m = rng.integers(1, 9), rng.integers(1, 9), rng.integers(1, 5)
            wa = rng.random(n) + 0.05
            wb = rng.random(n2) + 0.05
            a = TokenSet(rng.normal(size=(n, m)), wa / wa.sum())
            b = TokenSet(rng.normal(size=(n2, m)), wb / wb.sum())
            plan = solve_exact_ot(a, b)
            np.testing.assert_allclose(plan.coupling.sum(axis=1), a.weights, atol=1e-9)
            np.testing.assert_allclose(plan.coupling.sum(axis=0), b.weights, atol=1e-9)
            assert plan.coupling.min() >= 0.0
            assert plan.total_cost == pytest.approx(
                float(np.sum(plan.coupling * cost_matrix(a, b).values)), rel=1e-9
            )

    def test_general_weights_match_reference_lp(self):
        rng = np.random.default_rng(13)
        for _ in range(15):
            n, n2, m = int(rng.integers(2, 6)), int(rng.integers(2, 6)), int(rng.integers(1, 4))
            wa = rng.random(n) + 0.1
            wb = rng.random(n2) + 0.1
            a = TokenSet(rng.normal(size=(n, m)), wa / wa.sum())
            b = TokenSet(rng.normal(size=(n2, m)), wb / wb.sum())
            plan = solve_exact_ot(a, b)
            values = cost_matrix(a, b).values
            a_eq = np.zeros((n + n2, n * n2))
            for i in range(n):
                a_eq[i, i * n2 : (i + 1) * n2] = 1.0
            for j in range(n2):
                a_eq[n + j, j::n2] = 1.0
            ref = linprog(
                values.ravel(),
                A_eq=a_eq,
                b_eq=np.concatenate([a.weights, b.weights]),
                bounds=(0, None),
                method="highs",
            )
            assert ref.status == 0
            assert plan.total_cost == pytest.approx(ref.fun, rel=1e-9, abs=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            n, m = int(rng.integers(2, 9)), int(rng.integers(1, 5))
            a = random_tokenset(rng, n, m)
            b = random_tokenset(rng, n, m)
            shift = rng.uniform(-5.0, 5.0, size=m)
            plan = solve_exact_ot(a, b)
            plan_shifted = solve_exact_ot(
                TokenSet(a.points + shift), TokenSet(b.points + shift)
            )
            np.testing.assert_allclose(
                plan.coupling, plan_shifted.coupling, atol=1e-12
            )
            assert plan_shifted.total_cost == pytest.approx(
                plan.total_cost, rel=1e-9, abs=1e-9
            )

    def test_translation_invariance_simplex_route(self):
        rng = np.random.default_rng(19)
        for _ in range(8):
            n, n2, m = int(rng.integers(2, 7)), int(rng.integers(2, 7)), int(rng.integers(1, 4))
            wa = rng.random(n) + 0.1
            wb = rng.random(n2) + 0.1
            a = TokenSet(rng.normal(size=(n, m)), wa / wa.sum())
            b = TokenSet(rng.normal(size=(n2, m)), wb / wb.sum())
            shift = rng.uniform(-5.0, 5.0, size=m)
            plan = solve_exact_ot(a, b)
            plan_shifted = solve_exact_ot(
                TokenSet(a.points + shift, a.weights),
                TokenSet(b.points + shift, b.weights),
            )
            np.testing.assert_allclose(plan.coupling, plan_shifted.coupling, atol=1e-12)
            assert plan_shifted.total_cost == pytest.approx(
                plan.total_cost, rel=1e-9, abs=1e-9
            )

    def test_duplicate_points_are_handled_deterministically(self):
        a = TokenSet([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
        b = TokenSet([[0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
        first = solve_exact_ot(a, b)
        second = solve_exact_ot(a, b)
        np.testing.assert_array_equal(first.coupling, second.coupling)
        assert first.total_cost == pytest.approx((0 + 2 + 0) / 3, rel=1e-9)

    def test_determinism(self):
        rng = np.random.default_rng(23)
        a = random_tokenset(rng, 9, 3)
        b = random_tokenset(rng, 9, 3)
        p1 = solve_exact_ot(a, b)
        p2 = solve_exact_ot(a, b)
        np.testing.assert_array_equal(p1.coupling, p2.coupling)
        assert p1.total_cost == p2.total_cost

    def test_concurrent_solves_on_shared_sets(self):
        from concurrent.futures import ThreadPoolExecutor

        rng = np.random.default_rng(37)
        a = random_tokenset(rng, 12, 4)
        b = random_tokenset(rng, 12, 4)
        reference = solve_exact_ot(a, b)
        with ThreadPoolExecutor(max_workers=4) as pool:
            plans = list(pool.map(lambda _: solve_exact_ot(a, b), range(8)))
        for plan in plans:
            np.testing.assert_array_equal(plan.coupling, reference.coupling)


class TestW2Distance:
    def test_identity_is_zero(self):
        ts = TokenSet([[1.0, 2.0], [3.0, 4.0]])
        assert w2_distance(ts, ts) == 0.0

    def test_dirac_pair(self):
        assert w2_distance(TokenSet([[0.0, 0.0]]), TokenSet([[2.0, 0.0]])) == pytest.approx(2.0)

    def test_1d_derived(self):
        got = w2_distance(TokenSet([[0.0], [1.0]]), TokenSet([[3.0], [5.0]]))
        assert got == pytest.approx(np.sqrt(12.5), rel=1e-12)

    def test_metric_properties_on_random_triples(self):
        rng = np.random.default_rng(29)
        for _ in range(15):
            n, m = int(rng.integers(2, 7)), int(rng.integers(1, 4))
            a = random_tokenset(rng, n, m)
            b = random_tokenset(rng, n, m)
            c = random_tokenset(rng, n, m)
            dab, dba = w2_distance(a, b), w2_distance(b, a)
            dac, dbc = w2_distance(a, c), w2_distance(b, c)
            assert dab >= 0.0
            assert w2_distance(a, a) == 0.0
            assert dab == pytest.approx(dba, abs=1e-9)
            assert dab <= dac + dbc + 1e-8

    def test_symmetry_with_unequal_sizes(self):
        rng = np.random.default_rng(30)
        for _ in range(6):
            a = random_tokenset(rng, int(rng.integers(2, 7)), 3)
            b = random_tokenset(rng, int(rng.integers(2, 7)), 3)
            assert w2_distance(a, b) == pytest.approx(w2_distance(b, a), abs=1e-9)


class TestSolveAssignment:
    def test_derived_two_by_two(self):
        # Enumerating both permutations: identity 9+16=25 beats swap 25+4=29.
        result = solve_assignment(np.array([[9.0, 25.0], [4.0, 16.0]]))
        np.testing.assert_array_equal(result.permutation, [0, 1])
        assert result.cost == 25.0

    def test_zero_matrix_tie_breaks_to_identity(self):
        result = solve_assignment(np.zeros((5, 5)))
        np.testing.assert_array_equal(result.permutation, np.arange(5))
        assert result.cost == 0.0

    def test_diagonal_dominant(self):
        result = solve_assignment(np.array([[0.0, 9.0], [9.0, 0.0]]))
        np.testing.assert_array_equal(result.permutation, [0, 1])
        assert result.cost == 0.0

    def test_non_square_rejected(self):
        with pytest.raises(InvalidParameterError):
            solve_assignment(np.zeros((2, 3)))

    def test_accepts_cost_matrix_instances(self):
        a = TokenSet([[0.0], [1.0]])
        b = TokenSet([[3.0], [5.0]])
        result = solve_assignment(cost_matrix(a, b))
        np.testing.assert_array_equal(result.permutation, [0, 1])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 10_000))
    def test_matches_scipy_on_random_matrices(self, n, seed):
        rng = np.random.default_rng(seed)
        values = rng.uniform(0.0, 10.0, size=(n, n))
        result = solve_assignment(values)
        rows, cols = linear_sum_assignment(values)
        assert result.cost == pytest.approx(float(values[rows, cols].sum()), rel=1e-12)
        assert sorted(result.permutation.tolist()) == list(range(n))

    def test_consistency_with_general_solver(self):
        rng = np.random.default_rng(31)
        for n in (2, 4, 8, 12):
            a = random_tokenset(rng, n, 3)
            b = random_tokenset(rng, n, 3)
            assignment = solve_assignment(cost_matrix(a, b))
            simplex_cost = solve_exact_ot(a, b, method="simplex").total_cost
            assert assignment.cost / n == pytest.approx(simplex_cost, rel=1e-9)


class TestOracles:
    def test_brute_force_trivial(self):
        a = TokenSet([[1.0, 1.0]])
        b = TokenSet([[4.0, 5.0]])
        assert brute_force_ot_uniform(a, b) == pytest.approx(25.0)
        assert brute_force_ot_uniform(a, a) == 0.0

    def test_brute_force_guard(self):
        big = TokenSet(np.zeros((9, 1)) + np.arange(9)[:, None])
        with pytest.raises(InvalidParameterError):
            brute_force_ot_uniform(big, big)

    def test_sorted_1d_examples(self):
        a = TokenSet([[0.0], [1.0]])
        b = TokenSet([[3.0], [5.0]])
        assert sorted_1d_ot(a, b) == pytest.approx(12.5)
        assert sorted_1d_ot(a, a) == 0.0
        assert sorted_1d_ot(TokenSet([[5.0], [0.0]]), TokenSet([[0.0], [5.0]])) == 0.0

    def test_sorted_1d_rejects_multidim(self):
        ts = TokenSet([[0.0, 1.0]])
        with pytest.raises(DimensionMismatchError):
            sorted_1d_ot(ts, ts)
