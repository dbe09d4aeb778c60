"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also echoed to the terminal when output is captured.
"""

import time

import numpy as np
import pytest

from moipdual import (
    MoipInstance,
    MultiplierGrid,
    dual_approx,
    fstar_contains,
    HyperplaneFamily,
    ideal_point,
    ip_solve,
    is_antichain,
    lagrangian_relaxation,
    max_filter,
    nondominated_set,
    preceq,
    scalarize,
    supported_frontier,
    value_function_sample,
    verify_strong_sdp,
    vsdp_solve,
)
from moipdual.bounds import halfspace_union_check
from moipdual.harness import ExperimentConfig, Problem, run_experiment
from moipdual.pareto import minkowski_sum
from moipdual.relaxations import lr_member_blocks, lr_scalar_value, scalarized_dual_value
from conftest import two_row, cut_square, binary_pair, integer_pair, small_knapsack
from oracles import brute_max, pair_case_table, sampled_min_union_contains

TOL = 1e-9
TRIALS = 1000


def report(capsys, name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def same(points, expected):
    P = sorted(tuple(float(v) for v in p) for p in points)
    E = sorted(tuple(float(v) for v in p) for p in expected)
    return len(P) == len(E) and all(np.allclose(p, e, atol=TOL, rtol=0) for p, e in zip(P, E))


def timed(fn):
    t = time.perf_counter()
    ok = fn()
    return ok, time.perf_counter() - t


# --------------------------------------------------------------- criterion 1


def c1_case_table():
    from fractions import Fraction as F

    inst = binary_pair()
    ok = True
    reps = [(2, 2), (2, 0.5), (0.5, 2), (0.5, 0.5), (0.1, 0.1), (0.35, 0), (0, 0.35)]
    for l1, l2 in reps:
        exp = pair_case_table(F(l1).limit_denominator(100), F(l2).limit_denominator(100))
        ok &= same(lagrangian_relaxation(inst, (l1, l2)).points, exp)
    ok &= same(lagrangian_relaxation(inst, (2, 2)).points, [(2, 2)])
    ok &= same(lagrangian_relaxation(inst, (0.35, 0)).points, [(0.35, 0), (-0.5, 1), (1, -0.5), (0.15, 0.5)])
    ok &= not lagrangian_relaxation(inst, (0.1, 0.1)).contains((0.1, 0.1))
    return ok


def c1_cut_square():
    inst = cut_square()
    return same(lagrangian_relaxation(inst, (0, 0)).points, [(-0.5, 1), (1, -0.5), (0.5, 0.5)]) and same(
        lagrangian_relaxation(inst, (0, 0.35)).points, [(0, 0.525), (1, -0.325), (-0.5, 1.175), (0.5, 0.325)]
    )


def c1_small_knapsack():
    inst = small_knapsack()
    return same(nondominated_set(inst).points, [(4, 2), (3, 3), (2, 4)]) and np.allclose(
        vsdp_solve(inst), [4, 4], atol=TOL, rtol=0
    )


def c1_two_row():
    inst = two_row()
    if not same(supported_frontier(inst).points(), [(1, 0), (0, 1)]):
        return False
    # all 21^4 multiplier matrices: every entry of the 2x2 matrix on the 21-point axis
    grid = MultiplierGrid.for_instance(inst, 2.5, 21)
    target = np.array([1.0, 0.0])
    for _, V, mask in lr_member_blocks(inst, grid):
        if np.any(np.all(np.abs(V - target) <= TOL, axis=2) & mask):
            return False
    return True


def c1_integer_pair():
    Z = value_function_sample(integer_pair(), [1])
    return same(Z[(1.0,)].points, [(1, -0.5), (0, 0), (-0.5, 1)])


@pytest.mark.parametrize(
    "name,fn",
    [
        ("1a binary pair case table", c1_case_table),
        ("1b cut square relaxations", c1_cut_square),
        ("1c small knapsack nondominated set and VSDP", c1_small_knapsack),
        ("1d two-row instance: supported points, (1,0) never in a grid relaxation", c1_two_row),
        ("1e integer pair value function at 1", c1_integer_pair),
    ],
)
def test_criterion_1(capsys, name, fn):
    ok, secs = timed(fn)
    report(capsys, f"criterion {name}", ok and secs < 1.0, f"{secs:.3f}s")


# --------------------------------------------------------------- criterion 2


def acc_instance(rng):
    """n <= 8, boxes within {0..2}, k = 2, at least one dualized row."""
    n = int(rng.integers(1, 9))
    m = int(rng.integers(1, 4))
    C = rng.integers(-5, 6, size=(2, n))
    A = rng.integers(-2, 5, size=(m, n))
    b = rng.integers(0, 3 * n, size=m)
    upper = rng.integers(1, 3, size=n)
    m1 = int(rng.integers(1, m + 1))
    dual = tuple(sorted(rng.choice(m, size=m1, replace=False).tolist()))
    return MoipInstance(C, A, b, np.zeros(n), upper, dual)


def acc_nonneg_instance(rng):
    """Nonnegative integer data with boxes within {0..2}."""
    n = int(rng.integers(1, 5))
    m = int(rng.integers(1, 3))
    A = rng.integers(0, 3, size=(m, n))
    b = rng.integers(0, 4, size=m)
    C = rng.integers(-3, 7, size=(2, n))
    return MoipInstance(C, A, b, np.zeros(n), np.full(n, 2.0), ())


def random_antichain(rng, k):
    pts = rng.integers(-3, 4, size=(int(rng.integers(1, 6)), k))
    return max_filter(pts).as_array()


def suite_weak_duality(rng):
    fails = 0
    for _ in range(TRIALS):
        inst = acc_instance(rng)
        lam = rng.uniform(0, 3, size=(2, len(inst.dualized)))
        fails += not preceq(nondominated_set(inst), lagrangian_relaxation(inst, lam))
    return fails


def suite_set_order(rng):
    fails = 0
    for _ in range(TRIALS):
        k = int(rng.integers(1, 4))
        S, T, U = (random_antichain(rng, k) for _ in range(3))
        fails += not preceq(S, S)
        if preceq(S, T) and preceq(T, S):
            fails += not same(S, T)
        if preceq(S, T) and preceq(T, U):
            fails += not preceq(S, U)
        # subsets and the Max of a raw set stay below an antichain above it
        raw = rng.integers(-3, 4, size=(int(rng.integers(1, 7)), k))
        top = max_filter(raw).as_array() + rng.integers(0, 2, size=k)
        if preceq(raw, top):
            sub = raw[rng.random(raw.shape[0]) < 0.5]
            if sub.shape[0]:
                fails += not preceq(sub, top)
            fails += not preceq(max_filter(raw), top)
        fails += not is_antichain(max_filter(raw))
        if k == 1:
            a, b = rng.integers(-3, 4, size=2)
            fails += preceq([[a]], [[b]]) != (a <= b)
    return fails


def suite_sandwich(rng):
    fails = 0
    for _ in range(TRIALS):
        inst = acc_instance(rng)
        mu = rng.uniform(0.05, 1, size=2)
        dual = scalarized_dual_value(inst, mu)
        ip = ip_solve(scalarize(inst, mu))
        if ip.optimal:
            fails += ip.value > dual + TOL
        grid = MultiplierGrid.for_instance(inst, 2.5, 2)
        for lam in grid.array():
            fails += dual > lr_scalar_value(inst, mu, lam) + TOL
    return fails


def suite_halfspace_union(rng):
    fails = 0
    for _ in range(TRIALS):
        inst = acc_instance(rng)
        U = dual_approx(inst, MultiplierGrid.for_instance(inst, 2.5, 2))
        Y = inst.feasible_values
        fails += sum(not halfspace_union_check(z, Y) for z in U.points)
    return fails


def suite_vsdp(rng):
    worst = 0.0
    fails = 0
    for _ in range(TRIALS):
        inst = acc_nonneg_instance(rng)
        v = vsdp_solve(inst)
        worst = max(worst, float(np.abs(v - ideal_point(inst)).max()))
        nd = nondominated_set(inst)
        fails += nd.contains(v, 1e-6) != (len(nd) == 1)
    return worst, fails


def suite_strong_sdp(rng):
    fails = 0
    for _ in range(TRIALS):
        fails += not verify_strong_sdp(acc_instance(rng))
    return fails


def folded(inst):
    """The same instance with its boxes written as rows, so every bound moves with the rhs."""
    n = inst.n
    return MoipInstance(inst.C, np.vstack([inst.A, np.eye(n)]), np.concatenate([inst.b, inst.upper]),
                        np.zeros(n), np.full(n, np.inf), ())


def suite_value_function(rng):
    fails = 0
    for _ in range(TRIALS):
        inst = folded(acc_nonneg_instance(rng))
        b1 = rng.integers(0, 3, size=inst.m)
        b2 = b1 + rng.integers(0, 2, size=inst.m)
        b3 = rng.integers(0, 3, size=inst.m)
        Z = value_function_sample(inst, [b1, b2, b3, b1 + b3])
        key = lambda b: tuple(float(v) for v in b)
        fails += not preceq(Z[key(b1)], Z[key(b2)])
        fails += not preceq(max_filter(minkowski_sum(Z[key(b1)], Z[key(b3)])), Z[key(b1 + b3)])
    return fails


_ELAPSED = []


@pytest.mark.parametrize(
    "name,suite",
    [
        ("2a weak Lagrangian duality", suite_weak_duality),
        ("2b set-order laws", suite_set_order),
        ("2c scalarized dual sandwich", suite_sandwich),
        ("2d halfspace-union diagnostic", suite_halfspace_union),
        ("2g strong SDP at supported points", suite_strong_sdp),
        ("2h value function monotone and superadditive", suite_value_function),
    ],
)
def test_criterion_2(capsys, name, suite):
    fails, secs = timed(lambda: suite(np.random.default_rng(2024)))
    _ELAPSED.append(secs)
    report(capsys, f"criterion {name}", fails == 0, f"{TRIALS} trials, {fails} failures, {secs:.1f}s")


def test_criterion_2_vsdp(capsys):
    (worst, fails), secs = timed(lambda: suite_vsdp(np.random.default_rng(2024)))
    _ELAPSED.append(secs)
    report(capsys, "criterion 2e VSDP equals the ideal point", worst <= 1e-6, f"max deviation {worst:.2e}")
    report(capsys, "criterion 2f VSDP nondominated iff singleton", fails == 0, f"{fails} failures")


def test_criterion_2_runtime(capsys):
    total = sum(_ELAPSED)
    report(capsys, "criterion 2 total runtime under 60 s", len(_ELAPSED) == 7 and total < 60, f"{total:.1f}s")


# --------------------------------------------------------------- criterion 3


def test_criterion_3(capsys):
    cfg = ExperimentConfig(Problem.KNAPSACK, trials=20, seed=7, n_vars=10, grid_count=11)
    rep, secs = timed(lambda: run_experiment(cfg))
    ok = (
        secs < 300
        and rep.all_valid
        and all(t.reports[m].d >= 0 for t in rep.trials for m in t.reports)
        and set(rep.summary) == set(rep.trials[0].reports)
    )
    with capsys.disabled():
        print("\n" + rep.summary_text(), end="")
    report(capsys, "criterion 3 scaled knapsack experiment", ok, f"{secs:.1f}s, all bounds valid={rep.all_valid}")


# --------------------------------------------------------------- criterion 4


def random_family(rng, k, planes):
    entries = []
    for _ in range(planes):
        mu = rng.uniform(0.2, 1.5, size=k).round(2)
        entries.append((tuple(mu), round(float(rng.uniform(-1, 1)), 2)))
    return entries


def query_points(rng, family):
    k = len(family[0][0])
    out = []
    for mu, f in family:
        # a point on this plane, with free coordinates on the 1e-2 lattice
        free = rng.integers(-50, 51, size=k - 1) / 100
        last = (f - np.dot(mu[:-1], free)) / mu[-1]
        out.append(np.append(free, last))
    out.append(rng.integers(-100, 101, size=k) / 100)  # off-plane in general
    return out


def on_boundary(z, family, band=1e-6):
    """z lies within the band of two planes, or within the band but not on one."""
    gaps = np.array([abs(np.dot(mu, z) - f) for mu, f in family])
    near = gaps <= band
    return near.sum() > 1 or np.any(near & (gaps > TOL))


def test_criterion_4(capsys):
    rng = np.random.default_rng(99)
    checked = disagree = 0
    families = 0
    for k in (2, 3):
        for planes in (2, 3):
            for _ in range(TRIALS // 2 if k == 3 else TRIALS):
                fam_entries = random_family(rng, k, planes)
                fam = HyperplaneFamily(tuple(fam_entries))
                families += 1
                for z in query_points(rng, fam_entries):
                    if on_boundary(z, fam_entries):
                        continue
                    checked += 1
                    half = 0.5 if k == 2 else 0.2
                    disagree += fstar_contains(z, fam) != sampled_min_union_contains(z, fam_entries, 1e-2, half)
    report(capsys, "criterion 4 fstar closed form vs sampled oracle", disagree == 0 and families >= 3000,
           f"{families} families, {checked} queries, {disagree} disagreements")
