"""MOIP instances, nondominated sets, scalarization and supported frontiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .exceptions import (
    DimensionError,
    InfeasibleError,
    PreconditionError,
    UnboundedError,
    UnsupportedDimensionError,
)
from .pareto import EPS_DOM, MINUS_MINF, ExtendedSet, max_filter
from .solvers import (
    ENUMERATION_CAP,
    IpProblem,
    LpProblem,
    Sense,
    enumerate_feasible,
    lp_solve,
)

EPS_MU = 1e-6
EPS_HAT = 1e-4


def _implied_upper(A, b, lower, upper, rows) -> np.ndarray:
    """Tighten infinite upper bounds using rows whose coefficients are all nonnegative."""
    hi = np.array(upper, dtype=float)
    lo = np.asarray(lower, dtype=float)
    for i in rows:
        a = A[i]
        if np.any(a < 0):
            continue
        for j in np.flatnonzero(a > 0):
            rest = b[i] - (a @ lo - a[j] * lo[j])
            hi[j] = min(hi[j], np.floor(rest / a[j] + 1e-9))
    return hi


@dataclass(frozen=True, eq=False)
class MoipInstance:
    """``max Cx`` subject to ``Ax <= b`` over integer boxes.

    ``dualized`` holds 0-based row indices forming ``(A¹, b¹)``; the other rows
    form ``(A², b²)`` and, together with the boxes, define ``Q``.  An infinite
    upper bound is replaced by the bound implied by the nonnegative rows (the
    kept rows only, when enumerating ``Q``).
    """

    C: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    dualized: tuple[int, ...] = ()
    name: str = ""
    cap: int = ENUMERATION_CAP

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        A = np.asarray(self.A, dtype=float)
        if A.ndim == 1:
            A = A.reshape(1, -1) if A.size else np.zeros((0, C.shape[1]))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        k, n = C.shape
        if k < 1 or n < 1:
            raise DimensionError("need at least one objective and one variable")
        if A.shape[1] != n or A.shape[0] != b.shape[0]:
            raise DimensionError(f"A is {A.shape}, b has {b.shape[0]} entries, n = {n}")
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != (n,) or hi.shape != (n,):
            raise DimensionError("one box per variable is required")
        if not np.all(np.isfinite(lo)) or np.any(lo != np.round(lo)):
            raise PreconditionError("lower bounds must be finite integers")
        if np.any(np.isfinite(hi) & (hi != np.round(hi))):
            raise PreconditionError("upper bounds must be integers or inf")
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise PreconditionError("C, A and b must be finite")
        dual = tuple(sorted(set(int(i) for i in self.dualized)))
        if any(i < 0 or i >= A.shape[0] for i in dual):
            raise PreconditionError(f"dualized row index out of range: {dual}")
        for name, val in (("C", C), ("A", A), ("b", b), ("lower", lo), ("upper", hi)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "dualized", dual)

    @classmethod
    def build(cls, C, rows: Sequence, lower=None, upper=None, dualized=(), name: str = "",
              cap: int = ENUMERATION_CAP) -> "MoipInstance":
        """Build from ``(coefficients, rhs)`` rows; all rows read ``a·x <= rhs``."""
        C = np.atleast_2d(np.asarray(C, dtype=float))
        n = C.shape[1]
        if any(len(r[0]) != n for r in rows):
            raise DimensionError(f"every row needs {n} coefficients")
        A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n)
        b = np.array([r[1] for r in rows], dtype=float)
        lower = np.zeros(n) if lower is None else lower
        upper = np.full(n, np.inf) if upper is None else upper
        return cls(C, A, b, lower, upper, tuple(dualized), name, cap)

    def __eq__(self, other):
        if not isinstance(other, MoipInstance):
            return NotImplemented
        return (
            self.C.shape == other.C.shape
            and self.A.shape == other.A.shape
            and np.array_equal(self.C, other.C)
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
            and self.dualized == other.dualized
        )

    __hash__ = object.__hash__

    @property
    def k(self) -> int:
        return self.C.shape[0]

    @property
    def n(self) -> int:
        return self.C.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.m) if i not in self.dualized)

    @property
    def A1(self) -> np.ndarray:
        return self.A[list(self.dualized)]

    @property
    def b1(self) -> np.ndarray:
        return self.b[list(self.dualized)]

    @property
    def A2(self) -> np.ndarray:
        return self.A[list(self.kept)]

    @property
    def b2(self) -> np.ndarray:
        return self.b[list(self.kept)]

    def rows(self, which: Sequence[int] | None = None) -> list:
        idx = range(self.m) if which is None else which
        return [(list(self.A[i]), "<=", float(self.b[i])) for i in idx]

    def box(self, which: Sequence[int] | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Integer box for enumeration, with infinite uppers tightened by ``which`` rows."""
        idx = range(self.m) if which is None else which
        hi = _implied_upper(self.A, self.b, self.lower, self.upper, idx)
        if not np.all(np.isfinite(hi)):
            bad = [j for j in range(self.n) if not np.isfinite(hi[j])]
            raise UnboundedError(
                f"variables {bad} have no finite upper bound, so the integer set cannot be enumerated"
            )
        return self.lower.astype(np.int64), hi.astype(np.int64)

    def ip_problem(self, objective, which: Sequence[int] | None = None) -> IpProblem:
        lo, hi = self.box(which)
        return IpProblem(list(objective), self.rows(which), list(lo), list(hi), self.cap)

    @cached_property
    def feasible_points(self) -> np.ndarray:
        """Feasible integer points ``X`` in lexicographic order."""
        pts = enumerate_feasible(self.ip_problem(self.C[0]))
        pts.setflags(write=False)
        return pts

    @cached_property
    def feasible_values(self) -> np.ndarray:
        vals = self.feasible_points @ self.C.T
        vals.setflags(write=False)
        return vals

    @cached_property
    def q_points(self) -> np.ndarray:
        """Integer points of ``Q``: the boxes and the kept rows."""
        pts = enumerate_feasible(self.ip_problem(self.C[0], self.kept))
        pts.setflags(write=False)
        return pts

    def with_rhs(self, beta) -> "MoipInstance":
        beta = np.asarray(beta, dtype=float).reshape(-1)
        if beta.shape != self.b.shape:
            raise DimensionError(f"rhs needs {self.m} entries, got {beta.shape[0]}")
        return MoipInstance(self.C, self.A, beta, self.lower, self.upper, self.dualized,
                            self.name, self.cap)

    def with_dualized(self, dualized) -> "MoipInstance":
        return MoipInstance(self.C, self.A, self.b, self.lower, self.upper, tuple(dualized),
                            self.name, self.cap)

    def objective_of(self, x) -> np.ndarray:
        return self.C @ np.asarray(x, dtype=float)

    def is_feasible(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,) or np.any(x != np.round(x)):
            return False
        if np.any(x < self.lower) or np.any(x > self.upper):
            return False
        return bool(np.all(self.A @ x <= self.b + tol))


def nondominated_set(inst: MoipInstance) -> ExtendedSet:
    """``Max`` of the feasible objective values; ``MINUS_MINF`` when infeasible."""
    vals = inst.feasible_values
    if vals.shape[0] == 0:
        return MINUS_MINF
    return max_filter(vals)


def efficient_points(inst: MoipInstance) -> np.ndarray:
    """Feasible points whose image is nondominated (all preimages kept)."""
    nd = nondominated_set(inst)
    if not nd.is_finite:
        return np.zeros((0, inst.n), dtype=np.int64)
    vals = inst.feasible_values
    P = nd.as_array()
    hit = np.any(np.all(np.abs(vals[:, None, :] - P[None, :, :]) <= EPS_DOM, axis=2), axis=1)
    return inst.feasible_points[hit]


def _check_weight(mu, k: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if mu.shape != (k,):
        raise DimensionError(f"weight has {mu.shape[0]} entries, expected {k}")
    if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
        raise PreconditionError(f"scalarizing weights must be strictly positive, got {mu}")
    return mu


def scalarize(inst: MoipInstance, mu) -> IpProblem:
    """Weighted-sum IP ``max μᵀCx`` over the feasible set."""
    mu = _check_weight(mu, inst.k)
    return inst.ip_problem(mu @ inst.C)


def ideal_point(inst: MoipInstance) -> np.ndarray:
    vals = inst.feasible_values
    if vals.shape[0] == 0:
        raise InfeasibleError("the ideal point needs a feasible instance")
    return vals.max(axis=0) + 0.0


def nadir_point(inst: MoipInstance) -> np.ndarray:
    nd = nondominated_set(inst)
    if not nd.is_finite:
        raise InfeasibleError("the nadir point needs a feasible instance")
    return nd.as_array().min(axis=0) + 0.0


# --------------------------------------------------------------------------- frontiers


@dataclass(frozen=True)
class FrontierEntry:
    x: tuple
    y: tuple[float, ...]
    weight: tuple[float, ...]


@dataclass(frozen=True)
class Frontier:
    """A biobjective frontier stored as its points, sorted by ascending ``y1``.

    For integer problems the entries are all supported nondominated points;
    for LP relaxations they are the extreme points of the nondominated chain.
    ``status`` is ``"ok"``, ``"infeasible"`` or ``"unbounded"``.  ``weights``
    lists every scalarizing weight evaluated during the search.
    """

    entries: tuple[FrontierEntry, ...]
    status: str = "ok"
    weights: tuple[tuple[float, ...], ...] = ()

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def points(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, 2))
        return np.array([e.y for e in self.entries], dtype=float)

    def __len__(self) -> int:
        return len(self.entries)

    def extreme_points(self, tol: float = 1e-9) -> np.ndarray:
        """Chain vertices with collinear interior points removed."""
        P = self.points()
        if P.shape[0] <= 2:
            return P
        keep = [0]
        for i in range(1, P.shape[0] - 1):
            a, b, c = P[keep[-1]], P[i], P[i + 1]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cross) > tol * max(1.0, np.abs(P).max()):
                keep.append(i)
        keep.append(P.shape[0] - 1)
        return P[keep]

    def as_extended_set(self) -> ExtendedSet:
        if self.status == "infeasible":
            return MINUS_MINF
        if self.status == "unbounded":
            from .pareto import PLUS_MINF

            return PLUS_MINF
        return ExtendedSet.finite(self.points(), check=False)

    def chain_value(self, s1: float) -> float:
        """Second coordinate of the chain at first coordinate ``s1`` (clamped to the ends)."""
        P = self.points()
        if s1 <= P[0, 0]:
            return float(P[0, 1])
        if s1 >= P[-1, 0]:
            return float(P[-1, 1])
        return float(np.interp(s1, P[:, 0], P[:, 1]))

    def contains(self, z, tol: float = 1e-9) -> bool:
        """Membership of ``z`` in the piecewise-linear chain."""
        P = self.points()
        z = np.asarray(z, dtype=float)
        if P.shape[0] == 0:
            return False
        if z[0] < P[0, 0] - tol or z[0] > P[-1, 0] + tol:
            return False
        if P.shape[0] == 1:
            return bool(np.all(np.abs(P[0] - z) <= tol))
        return abs(self.chain_value(z[0]) - z[1]) <= tol * max(1.0, abs(z[1]))

    def sample(self, spacing: float) -> np.ndarray:
        """Extreme points plus points along each segment at the given spacing."""
        if spacing <= 0:
            raise PreconditionError("sample spacing must be positive")
        P = self.extreme_points()
        out = [P[:1]] if P.shape[0] else []
        for a, b in zip(P[:-1], P[1:]):
            length = float(np.linalg.norm(b - a))
            steps = max(1, int(np.ceil(length / spacing)))
            t = np.arange(1, steps + 1)[:, None] / steps
            out.append(a + t * (b - a))
        return np.concatenate(out, axis=0) if out else np.zeros((0, 2))


def segment_weight(ya, yb) -> np.ndarray:
    """Weight normal to the segment from ``ya`` (larger ``y1``) to ``yb``."""
    return np.array([yb[1] - ya[1], ya[0] - yb[0]], dtype=float)


def _normalized(mu) -> tuple[float, ...]:
    mu = np.asarray(mu, dtype=float)
    return tuple(float(v) + 0.0 for v in mu / mu.sum())


def dichotomic_search(
    solve: Callable[[np.ndarray], list],
    extremes: tuple,
    tol: float,
) -> tuple[list, list]:
    """Generic biobjective dichotomic scheme.

    ``extremes`` is ``((x1, y1), (x2, y2))``: the lexicographic maxima for
    objective 1 then 2 and for objective 2 then 1.  ``solve(mu)`` returns all
    (or one) optimal ``(x, y)`` pairs for weight ``mu``.  Returns the collected
    pairs and the weights evaluated.
    """
    found: dict = {}
    weights: list = []

    def add(x, y):
        key = tuple(float(v) + 0.0 for v in y)
        if key not in found or tuple(x) < tuple(found[key]):
            found[key] = tuple(x)

    (xa, ya), (xb, yb) = extremes
    add(xa, ya)
    add(xb, yb)
    stack = []
    if np.linalg.norm(np.asarray(ya) - np.asarray(yb)) > tol:
        stack.append((np.asarray(ya, float), np.asarray(yb, float)))
    while stack:
        ya, yb = stack.pop()
        mu = segment_weight(ya, yb)
        if np.any(mu <= 0):
            continue
        weights.append(_normalized(mu))
        sols = solve(mu)
        base = float(mu @ ya)
        best = max(float(mu @ np.asarray(y)) for _, y in sols)
        scale = max(1.0, abs(base)) * float(mu.max())
        if best <= base + tol * scale:
            for x, y in sols:
                add(x, y)
            continue
        pts = sorted(sols, key=lambda s: -s[1][0])
        for x, y in pts:
            add(x, y)
        first, last = np.asarray(pts[0][1], float), np.asarray(pts[-1][1], float)
        stack.append((first, yb))
        stack.append((ya, last))
    return sorted(((x, y) for y, x in found.items()), key=lambda t: t[1][0]), weights


def _attach_weights(pairs, weights_used, extra_weights) -> Frontier:
    entries = []
    ys = [np.asarray(y, float) for _, y in pairs]
    for i, (x, y) in enumerate(pairs):
        if len(pairs) == 1:
            w = (0.5, 0.5)
        elif i + 1 < len(pairs):
            w = _normalized(segment_weight(ys[i + 1], ys[i]))
        else:
            w = _normalized(segment_weight(ys[i], ys[i - 1]))
        entries.append(FrontierEntry(tuple(x), tuple(float(v) + 0.0 for v in y), w))
    return Frontier(tuple(entries), "ok", tuple(extra_weights) + tuple(weights_used))


def _lex_max(values: np.ndarray, first: int) -> int:
    other = 1 - first
    return int(np.lexsort((-values[:, other], -values[:, first]))[0])


def frontier_from_values(points: np.ndarray, values: np.ndarray, tol: float = EPS_DOM) -> Frontier:
    """Supported frontier of a finite set of (point, objective value) pairs, k = 2."""
    if values.shape[0] == 0:
        return Frontier((), "infeasible")
    if values.shape[1] != 2:
        raise UnsupportedDimensionError("frontiers are computed for two objectives only")
    i1 = _lex_max(values, 0)
    i2 = _lex_max(values, 1)

    def solve(mu):
        s = values @ mu
        best = s.max()
        hit = np.flatnonzero(s >= best - tol * max(1.0, abs(best)))
        return [(tuple(int(v) for v in points[i]), tuple(values[i])) for i in hit]

    pairs, weights = dichotomic_search(
        solve,
        ((tuple(int(v) for v in points[i1]), tuple(values[i1])),
         (tuple(int(v) for v in points[i2]), tuple(values[i2]))),
        tol,
    )
    pairs = _dedupe_dominated(pairs, tol)
    extra = (_normalized((1.0, EPS_HAT)), _normalized((EPS_HAT, 1.0)))
    return _attach_weights(pairs, weights, extra)


def _dedupe_dominated(pairs, tol):
    if len(pairs) <= 1:
        return pairs
    Y = np.array([y for _, y in pairs], dtype=float)
    keep = max_filter(Y, tol)
    out = []
    for x, y in pairs:
        # near-duplicates within tol would give a degenerate segment weight
        if keep.contains(y, tol) and not any(np.all(np.abs(np.subtract(y, z)) <= tol) for _, z in out):
            out.append((x, y))
    return out


def supported_frontier(inst: MoipInstance) -> Frontier:
    """All supported nondominated points with a strictly positive weight each (k = 2)."""
    if inst.k != 2:
        raise UnsupportedDimensionError("supported_frontier is implemented for k = 2")
    return frontier_from_values(inst.feasible_points, inst.feasible_values)


def is_supported(inst: MoipInstance, x) -> bool:
    """Decide by LP whether some normalized ``μ >= EPS_MU`` makes ``x`` optimal."""
    if not inst.is_feasible(x):
        raise InfeasibleError(f"{tuple(x)} is not a feasible point")
    y0 = inst.objective_of(x)
    vals = inst.feasible_values
    others = max_filter(vals).as_array()
    k = inst.k
    rows = [(list(y0 - y), ">=", 0.0) for y in others]
    rows.append(([1.0] * k, "=", 1.0))
    out = lp_solve(LpProblem([0.0] * k, rows, Sense.MAX, [(EPS_MU, np.inf)] * k))
    return out.optimal


def lp_relaxation_frontier(
    solve_scalar: Callable[[np.ndarray, list], tuple],
    tol: float = 1e-7,
) -> Frontier:
    """Dichotomic search over an LP oracle, k = 2.

    ``solve_scalar(mu, floors)`` maximizes ``μᵀy`` over the relaxation's
    objective vectors ``y = Cx``, subject to ``y[i] >= v`` for each ``(i, v)``
    in ``floors``.  It returns ``(status, x, y)``.
    """
    from .solvers import Status

    def lex(first):
        w = np.zeros(2)
        w[first] = 1.0
        st, x, y = solve_scalar(w, [])
        if st is not Status.OPTIMAL:
            return st, x, y
        w2 = np.zeros(2)
        w2[1 - first] = 1.0
        out = solve_scalar(w2, [(first, y[first])])
        if out[0] is not Status.OPTIMAL:
            # the exact floor can fail by roundoff; retry with a tolerance band
            out = solve_scalar(w2, [(first, y[first] - tol * max(1.0, abs(y[first])))])
        return out

    a = lex(0)
    if a[0] is Status.INFEASIBLE:
        return Frontier((), "infeasible")
    if a[0] is Status.UNBOUNDED:
        return Frontier((), "unbounded")
    b = lex(1)
    if b[0] is Status.UNBOUNDED:
        return Frontier((), "unbounded")

    def solve(mu):
        st, x, y = solve_scalar(mu, [])
        return [(x, y)]

    pairs, weights = dichotomic_search(solve, ((a[1], a[2]), (b[1], b[2])), tol)
    pairs = _dedupe_dominated(pairs, tol)
    frontier = _attach_weights(pairs, weights, ())
    ext = frontier.extreme_points(tol)
    keep = [e for e in frontier.entries if any(np.allclose(e.y, p, atol=tol) for p in ext)]
    return Frontier(tuple(keep), "ok", frontier.weights)
