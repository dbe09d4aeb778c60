import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moipdual import (
    Method,
    MultiplierGrid,
    PreconditionError,
    UnsupportedDimensionError,
    bound_quality,
    ch_bound_report,
    dual_approx,
    halfspace_union_check,
    is_strong_upper_bound,
    lagrangian_bound_report,
    local_nadir_lower_bound,
    nondominated_set,
    supported_frontier,
)
from moipdual.bounds import lower_bound_valid, scaling, upper_bound_violations
from conftest import random_instance
from oracles import dominates


def brute_d(L, U):
    pts = {tuple(map(float, p)) for p in L} | {tuple(map(float, p)) for p in U}
    gamma = sum(math.hypot(*p) for p in pts) / len(pts)
    worst = max(min(math.dist(l, u) for u in U) for l in L)
    return worst / gamma, gamma


class TestLocalNadir:
    def test_knapsack_example(self, knap):
        assert local_nadir_lower_bound(supported_frontier(knap)).tolist() == [[2, 3], [3, 2]]

    def test_single_point(self):
        assert local_nadir_lower_bound([(1, 1)]).tolist() == [[1, 1]]

    def test_two_row_instance(self, tworow):
        assert local_nadir_lower_bound(supported_frontier(tworow)).tolist() == [[0, 0]]

    def test_unsorted_input(self):
        assert local_nadir_lower_bound([(4, 2), (2, 4)]).tolist() == [[2, 2]]

    def test_empty(self):
        with pytest.raises(PreconditionError):
            local_nadir_lower_bound(np.zeros((0, 2)))

    def test_three_objectives(self):
        with pytest.raises(UnsupportedDimensionError):
            local_nadir_lower_bound([(1, 2, 3)])

    @given(st.integers(0, 10_000))
    def test_lower_bound_validity(self, seed):
        inst = random_instance(np.random.default_rng(seed))
        nd = nondominated_set(inst)
        L = local_nadir_lower_bound(supported_frontier(inst))
        assert lower_bound_valid(L, nd)
        # independent check: no nondominated point lies strictly below some l
        for l in L:
            assert not any(dominates(l, y) for y in nd.points)
            assert any(all(a <= b + 1e-9 for a, b in zip(l, y)) for y in nd.points)


class TestQuality:
    def test_coincident(self):
        assert bound_quality([(3, 4)], [(3, 4)]) == (0.0, 5.0)

    def test_origin_only(self):
        with pytest.raises(PreconditionError):
            bound_quality([(0, 0)], [(0, 0)])

    def test_knapsack_example(self):
        L, U = [(2, 3), (3, 2)], [(4, 2), (3, 3), (2, 4)]
        gamma = (2 * math.sqrt(13) + 2 * math.sqrt(20) + math.sqrt(18)) / 5
        d, g = bound_quality(L, U)
        assert g == pytest.approx(gamma, abs=1e-12) and d == pytest.approx(1 / gamma, abs=1e-12)

    def test_multiset_union(self):
        _, g = bound_quality([(3, 4)], [(3, 4), (0, 1)], union="multiset")
        assert g == pytest.approx(11 / 3)
        assert scaling([(3, 4)], [(3, 4), (0, 1)]) == pytest.approx(3)

    def test_empty(self):
        with pytest.raises(PreconditionError):
            bound_quality(np.zeros((0, 2)), [(1, 1)])

    @given(st.integers(0, 10_000))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        L = rng.integers(-5, 6, size=(int(rng.integers(1, 6)), 2)).tolist()
        U = rng.integers(-5, 6, size=(int(rng.integers(1, 6)), 2)).tolist()
        if all(p == [0, 0] for p in L + U):
            return
        d, g = bound_quality(L, U)
        bd, bg = brute_d(L, U)
        assert d == pytest.approx(bd, abs=1e-12) and g == pytest.approx(bg, abs=1e-12)

    @given(st.integers(0, 10_000))
    def test_zero_when_contained(self, seed):
        rng = np.random.default_rng(seed)
        U = rng.normal(size=(6, 2)) + 3
        L = U[: int(rng.integers(1, 7))]
        assert bound_quality(L, U)[0] == 0.0

    @given(st.integers(0, 10_000))
    def test_adding_points_never_increases_distance(self, seed):
        rng = np.random.default_rng(seed)
        L, U = rng.normal(size=(4, 2)) + 2, rng.normal(size=(3, 2)) + 2
        extra = rng.normal(size=(2, 2)) + 2
        worst = lambda U: max(min(np.linalg.norm(u - l) for u in U) for l in L)
        d0, g0 = bound_quality(L, U)
        d1, g1 = bound_quality(L, np.vstack([U, extra]))
        assert d1 * g1 <= d0 * g0 + 1e-12
        assert d1 * g1 == pytest.approx(worst(np.vstack([U, extra])))


class TestStrength:
    def test_superset_is_strong(self, knap):
        assert is_strong_upper_bound([(4, 2), (3, 3), (2, 4), (5, 5)], nondominated_set(knap))

    def test_ch_not_strong_on_binary_example(self, pair):
        U = supported_frontier(pair).points()
        assert not is_strong_upper_bound(U, nondominated_set(pair))

    def test_disjoint(self, knap):
        assert not is_strong_upper_bound([(9, 9)], nondominated_set(knap))

    def test_needs_finite_set(self):
        from moipdual import MINUS_MINF

        with pytest.raises(PreconditionError):
            is_strong_upper_bound([(1, 1)], MINUS_MINF)


class TestHalfspaceUnion:
    def test_quarter_point(self, pair):
        assert halfspace_union_check((0.25, 0.25), pair.feasible_values)

    def test_below_origin(self):
        assert not halfspace_union_check((-1, -1), [(0, 0)])

    def test_dominated_but_inside(self, pair):
        assert halfspace_union_check((0.25, -0.5), pair.feasible_values)

    @given(st.integers(0, 10_000))
    def test_dual_approx_points_pass(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_instance(rng)
        U = dual_approx(inst, MultiplierGrid.for_instance(inst, 2.5, 3))
        Y = inst.feasible_values
        for z in U.points:
            assert halfspace_union_check(z, Y)
            assert all(any(zi >= yi - 1e-9 for zi, yi in zip(z, y)) for y in Y.tolist())


class TestReports:
    def test_lagrangian_report_fields(self, knap):
        grid = MultiplierGrid(2, 0)
        r = lagrangian_bound_report(knap, grid)
        assert r.method is Method.LAGRANGIAN and r.strong
        assert r.d == pytest.approx(bound_quality(r.L, r.U.as_array())[0])

    def test_ch_report_records_discretization(self, knap):
        r = ch_bound_report(knap)
        assert "0.05" in r.discretization and r.method is Method.CONVEX_HULL and r.strong
        assert r.as_dict()["method"] == "ch"

    @given(st.integers(0, 10_000))
    def test_reports_are_valid_bounds(self, seed):
        inst = random_instance(np.random.default_rng(seed))
        nd = nondominated_set(inst)
        Y = inst.feasible_values
        grid = MultiplierGrid.for_instance(inst, 2.5, 3)
        L = local_nadir_lower_bound(supported_frontier(inst))
        reports = []
        for make, U in ((lambda: lagrangian_bound_report(inst, grid), dual_approx(inst, grid).as_array()),
                        (lambda: ch_bound_report(inst), supported_frontier(inst).points())):
            try:
                reports.append(make())
            except PreconditionError:
                # the metric is undefined when every point is the origin
                assert not np.any(L) and not np.any(U)
        for r in reports:
            assert upper_bound_violations(r.U, Y).shape[0] == 0
            assert lower_bound_valid(r.L, nd)
            assert r.d == pytest.approx(bound_quality(r.L, r.U.as_array())[0], abs=1e-12)
            assert r.d >= 0 and r.gamma > 0
