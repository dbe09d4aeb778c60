import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moipdual import EnumerationCapError, IpProblem, LpProblem, NumericalError, PreconditionError, Sense, Status
from moipdual.solvers import conv_hull_lp, enumerate_feasible, ip_solve, lp_from_arrays, lp_solve
from oracles import brute_feasible, highs_conv_hull, highs_max


class TestLp:
    def test_single_bounded_variable(self):
        out = lp_solve(LpProblem([1.0], [([1.0], "<=", 1.0)]))
        assert out.status is Status.OPTIMAL and out.value == 1.0 and out.solution == (1.0,)

    def test_unbounded(self):
        assert lp_solve(LpProblem([1.0], [])).status is Status.UNBOUNDED

    def test_two_item_lattice_dual(self):
        # variables f(0), f(1), f(2)
        rows = [([0, 1, 0], ">=", 2), ([0, 2, -1], "<=", 0), ([1, 0, 0], "=", 0)]
        out = lp_solve(LpProblem([0, 0, 1], rows, Sense.MIN))
        assert out.status is Status.OPTIMAL and out.value == pytest.approx(4, abs=1e-9)

    def test_infeasible(self):
        out = lp_solve(LpProblem([1.0], [([1.0], "<=", -1.0)]))
        assert out.status is Status.INFEASIBLE

    def test_free_and_negative_bounds(self):
        # max -x - y, x free, y in [-3, -1], x >= y
        out = lp_solve(LpProblem([-1, -1], [([1, -1], ">=", 0)], Sense.MAX, [(-math.inf, math.inf), (-3, -1)]))
        assert out.value == pytest.approx(6) and out.solution == pytest.approx((-3, -3))

    def test_redundant_equalities(self):
        rows = [([1, 1], "=", 1), ([2, 2], "=", 2)]
        out = lp_solve(LpProblem([1, 0], rows))
        assert out.value == pytest.approx(1)

    def test_tolerances_reported(self):
        out = lp_solve(LpProblem([1.0], [([1.0], "<=", 1.0)]))
        assert out.tolerances == {"feasibility": 1e-7, "optimality": 1e-9}

    def test_cycling_guard_raises(self):
        p = lp_from_arrays([1, 1], A_ub=[[1, 2], [2, 1]], b_ub=[4, 4])
        with pytest.raises(NumericalError):
            lp_solve(p, max_iter=0)

    def test_row_length_checked(self):
        with pytest.raises(PreconditionError):
            LpProblem([1, 1], [([1], "<=", 1)])

    def test_degenerate_cycling_example(self):
        # Beale's classic cycling instance; Bland's rule must terminate
        c = [0.75, -150, 0.02, -6]
        A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
        out = lp_solve(lp_from_arrays(c, A_ub=A, b_ub=[0, 0, 1]))
        assert out.value == pytest.approx(0.05)

    @given(st.integers(0, 10_000))
    def test_matches_highs(self, seed):
        rng = np.random.default_rng(seed)
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        A = rng.integers(-3, 6, size=(m, n)).astype(float)
        b = rng.integers(-2, 8, size=m).astype(float)
        c = rng.integers(-4, 6, size=n).astype(float)
        hi = rng.choice([2.0, 5.0, math.inf], size=n)
        bounds = [(0.0, h) for h in hi]
        ours = lp_solve(lp_from_arrays(c, A_ub=A, b_ub=b, bounds=bounds))
        ref = highs_max(c, A, b, bounds=[(0, None if math.isinf(h) else h) for h in hi])
        status = {0: Status.OPTIMAL, 2: Status.INFEASIBLE, 3: Status.UNBOUNDED}[ref.status]
        assert ours.status is status
        if status is Status.OPTIMAL:
            assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
            x = np.array(ours.solution)
            assert np.all(A @ x <= b + 1e-7)


class TestIp:
    def test_knapsack_first_objective(self):
        out = ip_solve(IpProblem([2, 1], [([1, 1], "<=", 2)], [0, 0], [2, 2]))
        assert out.value == 4 and out.solution == (2, 0)

    def test_infeasible_rows(self):
        p = IpProblem([1], [([1], "<=", -1), ([1], ">=", 0)], [0], [3])
        assert ip_solve(p).status is Status.INFEASIBLE

    def test_weighted_sum_on_two_row_instance(self):
        p = IpProblem([1, 1], [([2, 4], "<=", 5), ([4, 2], "<=", 5)], [0, 0], [1, 1])
        assert ip_solve(p).value == 1

    def test_lexicographic_tie_break(self):
        p = IpProblem([1, 1], [([1, 1], "<=", 1)], [0, 0], [1, 1])
        assert ip_solve(p).solution == (0, 1)
        assert ip_solve(p, "bnb").solution == (0, 1)

    def test_cap_error_mentions_branch_and_bound(self):
        p = IpProblem([1] * 25, [], [0] * 25, [1] * 25)
        with pytest.raises(EnumerationCapError, match="branch and bound"):
            ip_solve(p)

    def test_auto_switches_to_bnb_above_cap(self):
        p = IpProblem([1.0] * 26, [([1.0] * 26, "<=", 3)], [0] * 26, [1] * 26)
        out = ip_solve(p, "auto")
        assert out.value == 3

    def test_box_must_be_integral(self):
        with pytest.raises(PreconditionError):
            IpProblem([1], [], [0], [math.inf])

    @given(st.integers(0, 10_000))
    def test_enumeration_bnb_and_lp_bound_agree(self, seed):
        rng = np.random.default_rng(seed)
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        A = rng.integers(-2, 5, size=(m, n))
        b = rng.integers(0, 7, size=m)
        c = rng.integers(-4, 6, size=n)
        hi = rng.integers(1, 4, size=n)
        rows = [(list(a), "<=", float(r)) for a, r in zip(A, b)]
        p = IpProblem(list(c), rows, [0] * n, list(hi))
        e, bb = ip_solve(p), ip_solve(p, "bnb")
        feas = brute_feasible(A, b, [0] * n, hi)
        best = max(int(np.dot(c, x)) for x in feas)
        assert e.value == best == bb.value
        assert e.solution == bb.solution == min(x for x in feas if np.dot(c, x) == best)
        lp = lp_solve(LpProblem(list(c), rows, Sense.MAX, [(0, h) for h in hi]))
        assert e.value <= lp.value + 1e-7


class TestEnumerate:
    def test_two_row_instance(self):
        p = IpProblem([1, 0], [([2, 4], "<=", 5), ([4, 2], "<=", 5)], [0, 0], [1, 1])
        assert sorted(map(tuple, enumerate_feasible(p).tolist())) == [(0, 0), (0, 1), (1, 0)]

    def test_binary_sum_at_most_one(self):
        p = IpProblem([1, 0], [([1, 1], "<=", 1)], [0, 0], [1, 1])
        assert enumerate_feasible(p).tolist() == [[0, 0], [0, 1], [1, 0]]

    def test_empty(self):
        p = IpProblem([1], [([1], "<=", -1)], [0], [2])
        assert enumerate_feasible(p).shape == (0, 1)

    @given(st.integers(0, 10_000))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n, m = int(rng.integers(1, 4)), int(rng.integers(0, 3))
        A = rng.integers(-2, 4, size=(m, n))
        b = rng.integers(-1, 5, size=m)
        lo = rng.integers(-1, 1, size=n)
        hi = lo + rng.integers(0, 3, size=n)
        p = IpProblem([0] * n, [(list(a), "<=", float(r)) for a, r in zip(A, b)], list(lo), list(hi))
        assert list(map(tuple, enumerate_feasible(p).tolist())) == brute_feasible(A, b, lo, hi)


class TestConvHull:
    def test_vertex_of_triangle(self):
        assert conv_hull_lp([(0, 0), (1, 0), (0, 1)], [1, 1]).value == pytest.approx(1)

    def test_square_cut_by_row(self):
        out = conv_hull_lp(list(itertools.product([0, 1], repeat=2)), [0.5, 0.5], [([1, 1], "<=", 1.5)])
        assert out.value == pytest.approx(0.75, abs=1e-12)

    def test_single_point(self):
        assert conv_hull_lp([(2, 3)], [1, -1]).value == pytest.approx(-1)

    def test_two_row_instance_value(self):
        out = conv_hull_lp(list(itertools.product([0, 1], repeat=2)), [1, 1],
                           [([2, 4], "<=", 5), ([4, 2], "<=", 5)])
        assert out.value == pytest.approx(5 / 3, abs=1e-12)
        assert out.solution == pytest.approx((5 / 6, 5 / 6), abs=1e-12)

    def test_empty_points_rejected(self):
        with pytest.raises(PreconditionError):
            conv_hull_lp([], [1])

    @given(st.integers(0, 10_000))
    def test_hull_max_is_vertex_max(self, seed):
        rng = np.random.default_rng(seed)
        P = rng.integers(-5, 6, size=(int(rng.integers(1, 12)), 3))
        c = rng.normal(size=3)
        assert conv_hull_lp(P, c).value == pytest.approx(float((P @ c).max()), abs=1e-9)

    @given(st.integers(0, 10_000))
    def test_rows_match_highs(self, seed):
        rng = np.random.default_rng(seed)
        P = rng.integers(0, 3, size=(int(rng.integers(1, 10)), 2))
        c = rng.normal(size=2)
        rows = [(list(rng.integers(-2, 4, size=2)), float(rng.integers(0, 5)))]
        ours = conv_hull_lp(P, c, [(a, "<=", r) for a, r in rows])
        ref = highs_conv_hull(P, c, rows)
        if ref.status == 2:
            assert ours.status is Status.INFEASIBLE
        else:
            assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
