"""Exact small-scale solvers.

* :func:`lp_solve` -- dense two-phase tableau simplex.  Dantzig pricing for a
  bounded number of pivots, then Bland's rule, so it always terminates.
* :func:`ip_solve` / :func:`enumerate_feasible` -- integer programs over finite
  boxes, by enumeration (default) or LP-bounded best-first branch and bound.
* :func:`conv_hull_lp` -- maximize a linear objective over the convex hull of
  an enumerated point set intersected with extra rows.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import EnumerationCapError, NumericalError, PreconditionError

EPS_FEAS = 1e-7
EPS_OPT = 1e-9
EPS_PIVOT = 1e-9
ENUMERATION_CAP = 2**24

_CHUNK = 1 << 16


class Status(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


class Sense(enum.Enum):
    MAX = "max"
    MIN = "min"


_RELATIONS = ("<=", "=", ">=")


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    value: float | None = None
    solution: tuple[float, ...] | None = None
    iterations: int = 0
    tolerances: dict = field(
        default_factory=lambda: {"feasibility": EPS_FEAS, "optimality": EPS_OPT}
    )

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class LpProblem:
    """``max|min c·x`` subject to rows ``a·x (<=|=|>=) rhs`` and variable bounds.

    ``bounds`` holds one ``(lo, hi)`` pair per variable; either end may be
    infinite.  The default bound is ``[0, inf)``.
    """

    objective: Sequence[float]
    rows: list = field(default_factory=list)
    sense: Sense = Sense.MAX
    bounds: list | None = None

    def __post_init__(self):
        n = len(self.objective)
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != n:
                raise PreconditionError(
                    f"row has {len(coeffs)} coefficients, objective has {n}"
                )
            if rel not in _RELATIONS:
                raise PreconditionError(f"unknown relation {rel!r}")
        if self.bounds is not None and len(self.bounds) != n:
            raise PreconditionError("one (lo, hi) bound pair is needed per variable")

    @property
    def n(self) -> int:
        return len(self.objective)

    def arrays(self):
        """Return ``(c, A, rel, rhs, lo, hi)`` as numpy arrays."""
        n = self.n
        c = np.asarray(self.objective, dtype=float)
        if self.rows:
            A = np.array([r[0] for r in self.rows], dtype=float).reshape(len(self.rows), n)
            rel = np.array([r[1] for r in self.rows])
            rhs = np.array([r[2] for r in self.rows], dtype=float)
        else:
            A, rel, rhs = np.zeros((0, n)), np.array([], dtype="<U2"), np.zeros(0)
        if self.bounds is None:
            lo, hi = np.zeros(n), np.full(n, np.inf)
        else:
            lo = np.array([b[0] for b in self.bounds], dtype=float)
            hi = np.array([b[1] for b in self.bounds], dtype=float)
        return c, A, rel, rhs, lo, hi


def lp_from_arrays(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
                   sense: Sense = Sense.MAX) -> LpProblem:
    c = list(np.asarray(c, dtype=float))
    rows = []
    if A_ub is not None:
        rows += [(list(a), "<=", float(r)) for a, r in zip(np.asarray(A_ub, float), b_ub)]
    if A_eq is not None:
        rows += [(list(a), "=", float(r)) for a, r in zip(np.asarray(A_eq, float), b_eq)]
    return LpProblem(c, rows, sense, bounds)


# --------------------------------------------------------------------------- simplex


class _Tableau:
    """Standard-form tableau for ``min c·x, A x = b, x >= 0`` with ``b >= 0``."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int]):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.basis = list(basis)
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def set_cost(self, c: np.ndarray):
        m = self.m
        n = self.T.shape[1] - 1
        self.T[m, :n] = c
        self.T[m, n] = 0.0
        for r, j in enumerate(self.basis):
            if self.T[m, j] != 0.0:
                self.T[m] -= self.T[m, j] * self.T[r]

    def pivot(self, r: int, j: int):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.iterations += 1

    def run(self, allowed: np.ndarray, max_iter: int, dantzig_budget: int) -> bool:
        """Iterate to optimality; False means unbounded.  ``allowed`` masks entering columns."""
        T = self.T
        m = self.m
        start = self.iterations
        while True:
            if self.iterations - start > max_iter:
                raise NumericalError(
                    f"simplex exceeded {max_iter} pivots (cycling guard)"
                )
            red = T[m, :-1]
            neg = np.flatnonzero(allowed & (red < -EPS_OPT))
            if neg.size == 0:
                return True
            bland = self.iterations - start >= dantzig_budget
            j = int(neg[0]) if bland else int(neg[np.argmin(red[neg])])
            colj = T[:m, j]
            pos = np.flatnonzero(colj > EPS_PIVOT)
            if pos.size == 0:
                return False
            ratios = T[pos, -1] / colj[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[np.argmax(colj[ties])])
            self.pivot(r, j)


def lp_solve(problem: LpProblem, *, max_iter: int | None = None) -> SolveOutcome:
    """Solve an LP exactly up to the documented tolerances.

    Raises :class:`NumericalError` if the cycling guard trips or the returned
    point fails the feasibility re-check; never returns a wrong status silently.
    """
    c, A, rel, rhs, lo, hi = problem.arrays()
    n = problem.n
    if np.any(lo > hi):
        return SolveOutcome(Status.INFEASIBLE)
    sign = 1.0 if problem.sense is Sense.MIN else -1.0

    # Substitute x = shift + M z with z >= 0.
    cols: list[np.ndarray] = []
    shift = np.zeros(n)
    extra_rows: list[tuple[np.ndarray, float]] = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo[j]):
            shift[j] = lo[j]
            cols.append(e)
            if np.isfinite(hi[j]):
                extra_rows.append((len(cols) - 1, hi[j] - lo[j]))
        elif np.isfinite(hi[j]):
            shift[j] = hi[j]
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    M = np.array(cols).T if cols else np.zeros((n, 0))  # n x nz
    nz = M.shape[1]
    cz = sign * (c @ M)
    Az = A @ M
    bz = rhs - A @ shift
    rel = list(rel)
    for zi, ub in extra_rows:
        row = np.zeros(nz)
        row[zi] = 1.0
        Az = np.vstack([Az, row])
        bz = np.append(bz, ub)
        rel.append("<=")

    m = Az.shape[0]
    n_slack = sum(1 for r in rel if r != "=")
    total = nz + n_slack
    S = np.zeros((m, total))
    S[:, :nz] = Az
    b_std = bz.copy()
    basis: list[int | None] = [None] * m
    k = nz
    for i, r in enumerate(rel):
        if r == "<=":
            S[i, k] = 1.0
        elif r == ">=":
            S[i, k] = -1.0
        if r != "=":
            k += 1
        if b_std[i] < 0:
            S[i] *= -1.0
            b_std[i] *= -1.0
        if r != "=" and S[i, k - 1] > 0:
            basis[i] = k - 1

    need = [i for i in range(m) if basis[i] is None]
    n_art = len(need)
    full = np.zeros((m, total + n_art))
    full[:, :total] = S
    for a, i in enumerate(need):
        full[i, total + a] = 1.0
        basis[i] = total + a
    tab = _Tableau(full, b_std, basis)
    if max_iter is None:
        max_iter = 200 * (m + total + n_art) + 1000
    budget = 20 * (m + total) + 50

    if n_art:
        cost = np.zeros(total + n_art)
        cost[total:] = 1.0
        tab.set_cost(cost)
        tab.run(np.ones(total + n_art, dtype=bool), max_iter, budget)
        infeas = -tab.T[-1, -1]
        scale = max(1.0, float(np.abs(b_std).max(initial=0.0)))
        if infeas > EPS_FEAS * scale:
            return SolveOutcome(Status.INFEASIBLE, iterations=tab.iterations)
        # drive artificials out of the basis; drop redundant rows
        r = 0
        while r < tab.m:
            j = tab.basis[r]
            if j >= total:
                cand = np.flatnonzero(np.abs(tab.T[r, :total]) > EPS_PIVOT)
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                else:
                    tab.T = np.delete(tab.T, r, axis=0)
                    del tab.basis[r]
                    continue
            r += 1
        tab.T = np.delete(tab.T, np.s_[total : total + n_art], axis=1)

    cost = np.zeros(total)
    cost[:nz] = cz
    tab.set_cost(cost)
    if not tab.run(np.ones(total, dtype=bool), max_iter, budget):
        return SolveOutcome(Status.UNBOUNDED, iterations=tab.iterations)

    zfull = np.zeros(total)
    for r, j in enumerate(tab.basis):
        zfull[j] = tab.T[r, -1]
    x = shift + M @ zfull[:nz]
    _check_feasible(x, c, A, rel[: A.shape[0]], rhs, lo, hi)
    value = float(c @ x)
    return SolveOutcome(
        Status.OPTIMAL, value, tuple(float(v) + 0.0 for v in x), tab.iterations
    )


def _check_feasible(x, c, A, rel, rhs, lo, hi):
    scale = max(1.0, float(np.abs(rhs).max(initial=0.0)), float(np.abs(x).max(initial=0.0)))
    tol = EPS_FEAS * scale
    lhs = A @ x
    for i, r in enumerate(rel):
        if (r == "<=" and lhs[i] > rhs[i] + tol) or (r == ">=" and lhs[i] < rhs[i] - tol) or (
            r == "=" and abs(lhs[i] - rhs[i]) > tol
        ):
            raise NumericalError(f"simplex returned a point violating row {i} by {lhs[i] - rhs[i]:.3g}")
    if np.any(x < lo - tol) or np.any(x > hi + tol):
        raise NumericalError("simplex returned a point outside the variable bounds")


# --------------------------------------------------------------------------- integer programs


@dataclass
class IpProblem:
    """``max c·x`` over integer points of a finite box satisfying ``A x <= b``.

    ``rows`` uses the same ``(coefficients, relation, rhs)`` triples as
    :class:`LpProblem`.
    """

    objective: Sequence[float]
    rows: list
    lower: Sequence[int]
    upper: Sequence[int]
    cap: int = ENUMERATION_CAP

    def __post_init__(self):
        n = len(self.objective)
        if len(self.lower) != n or len(self.upper) != n:
            raise PreconditionError("one integer interval is needed per variable")
        for v in list(self.lower) + list(self.upper):
            if not math.isfinite(v) or float(v) != int(v):
                raise PreconditionError("integer boxes must have finite integer bounds")
        for coeffs, rel, _ in self.rows:
            if len(coeffs) != n:
                raise PreconditionError("row length does not match the objective")
            if rel not in _RELATIONS:
                raise PreconditionError(f"unknown relation {rel!r}")

    @property
    def n(self) -> int:
        return len(self.objective)

    def box_volume(self) -> int:
        return math.prod(max(0, int(h) - int(l) + 1) for l, h in zip(self.lower, self.upper))

    def row_arrays(self):
        """Rows as ``G x <= h`` (``>=`` rows negated, ``=`` rows split)."""
        G, h = [], []
        for coeffs, rel, rhs in self.rows:
            a = np.asarray(coeffs, dtype=float)
            if rel in ("<=", "="):
                G.append(a)
                h.append(rhs)
            if rel in (">=", "="):
                G.append(-a)
                h.append(-rhs)
        n = self.n
        return np.array(G, dtype=float).reshape(len(G), n), np.array(h, dtype=float)


def box_points(lower, upper, cap: int = ENUMERATION_CAP):
    """Yield chunks of the integer box in lexicographic order (first variable slowest)."""
    lower = np.asarray(lower, dtype=np.int64)
    upper = np.asarray(upper, dtype=np.int64)
    sizes = np.maximum(upper - lower + 1, 0)
    total = math.prod(int(s) for s in sizes)
    if total > cap:
        raise EnumerationCapError(
            f"box holds {total} points, above the enumeration cap {cap}; "
            "use method='bnb' (branch and bound) for larger boxes"
        )
    n = len(sizes)
    if total == 0:
        return
    if n == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    strides = np.ones(n, dtype=np.int64)
    for j in range(n - 2, -1, -1):
        strides[j] = strides[j + 1] * sizes[j + 1]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        yield lower + (idx[:, None] // strides) % sizes


def enumerate_feasible(p: IpProblem) -> np.ndarray:
    """All integer box points satisfying the rows, in lexicographic order."""
    G, h = p.row_arrays()
    out = []
    for pts in box_points(p.lower, p.upper, p.cap):
        if G.shape[0]:
            tol = EPS_FEAS * np.maximum(1.0, np.abs(h))
            ok = np.all(pts @ G.T <= h + tol, axis=1)
            pts = pts[ok]
        out.append(pts)
    if not out:
        return np.zeros((0, p.n), dtype=np.int64)
    return np.concatenate(out, axis=0)


def ip_solve(p: IpProblem, method: str = "enumerate") -> SolveOutcome:
    """Exact optimum of an integer program.

    ``method="enumerate"`` scans the box (ties go to the lexicographically
    smallest solution); ``"bnb"`` runs best-first branch and bound with LP
    bounds and the same tie rule; ``"auto"`` picks enumeration under the cap.
    """
    if method == "auto":
        method = "enumerate" if p.box_volume() <= p.cap else "bnb"
    if method == "bnb":
        return _branch_and_bound(p)
    if method != "enumerate":
        raise PreconditionError(f"unknown IP method {method!r}")
    c = np.asarray(p.objective, dtype=float)
    best_val, best_x = -np.inf, None
    G, h = p.row_arrays()
    for pts in box_points(p.lower, p.upper, p.cap):
        if G.shape[0]:
            tol = EPS_FEAS * np.maximum(1.0, np.abs(h))
            pts = pts[np.all(pts @ G.T <= h + tol, axis=1)]
        if pts.shape[0] == 0:
            continue
        vals = pts @ c
        i = int(np.argmax(vals))  # first maximizer = lexicographically smallest in this chunk
        if vals[i] > best_val + EPS_OPT * max(1.0, abs(best_val) if np.isfinite(best_val) else 1.0):
            best_val, best_x = float(vals[i]), pts[i]
    if best_x is None:
        return SolveOutcome(Status.INFEASIBLE)
    return SolveOutcome(Status.OPTIMAL, best_val, tuple(int(v) for v in best_x))


def _branch_and_bound(p: IpProblem) -> SolveOutcome:
    c = np.asarray(p.objective, dtype=float)
    G, h = p.row_arrays()
    rows = [(list(g), "<=", float(r)) for g, r in zip(G, h)]

    def relax(lo, hi):
        return lp_solve(LpProblem(list(c), rows, Sense.MAX, list(zip(lo, hi))))

    lo0 = [float(v) for v in p.lower]
    hi0 = [float(v) for v in p.upper]
    root = relax(lo0, hi0)
    if not root.optimal:
        return SolveOutcome(Status.INFEASIBLE)
    counter = itertools.count()
    heap = [(-root.value, next(counter), lo0, hi0, root)]
    best_val, best_x = -np.inf, None
    nodes = 0
    while heap:
        neg_bound, _, lo, hi, sol = heapq.heappop(heap)
        nodes += 1
        tol = EPS_FEAS * max(1.0, abs(best_val) if np.isfinite(best_val) else 1.0)
        if -neg_bound < best_val - tol:
            continue
        x = np.asarray(sol.solution)
        frac = np.abs(x - np.round(x))
        if np.all(frac <= EPS_FEAS):
            xi = tuple(int(v) for v in np.round(x))
            val = float(c @ np.array(xi))
            if val > best_val + tol or (abs(val - best_val) <= tol and (best_x is None or xi < best_x)):
                best_val, best_x = val, xi
            # other optima in this node may be lexicographically smaller
            j = next((j for j in range(p.n) if lo[j] < hi[j]), None)
            if j is None:
                continue
            splits = [(lo[j], float(xi[j]) - 1.0), (float(xi[j]), float(xi[j])), (float(xi[j]) + 1.0, hi[j])]
        else:
            j = int(np.argmax(frac))
            splits = [(lo[j], math.floor(x[j])), (math.ceil(x[j]), hi[j])]
        for a, bnd in splits:
            if a > bnd:
                continue
            nlo, nhi = list(lo), list(hi)
            nlo[j], nhi[j] = a, bnd
            child = relax(nlo, nhi)
            if child.optimal and child.value >= best_val - tol:
                heapq.heappush(heap, (-child.value, next(counter), nlo, nhi, child))
    if best_x is None:
        return SolveOutcome(Status.INFEASIBLE, iterations=nodes)
    return SolveOutcome(Status.OPTIMAL, best_val, best_x, iterations=nodes)


# --------------------------------------------------------------------------- convex hull LP


def conv_hull_lp(points, objective, extra_rows=()) -> SolveOutcome:
    """Maximize ``objective·x`` over ``conv(points)`` subject to ``extra_rows``.

    Variables are convex weights on ``points``; the reported solution is the
    combined point ``x = Σ λ_i q_i``.
    """
    Q = np.asarray(points, dtype=float)
    if Q.ndim != 2 or Q.shape[0] == 0:
        raise PreconditionError("conv_hull_lp needs a nonempty point list")
    obj = np.asarray(objective, dtype=float)
    if obj.shape != (Q.shape[1],):
        raise PreconditionError("objective length does not match the point dimension")
    Q, inverse = np.unique(Q, axis=0, return_inverse=True)
    rows = [(list(np.asarray(a, float) @ Q.T), rel, float(r)) for a, rel, r in extra_rows]
    rows.append(([1.0] * Q.shape[0], "=", 1.0))
    out = lp_solve(LpProblem(list(Q @ obj), rows, Sense.MAX))
    if not out.optimal:
        return out
    lam = np.asarray(out.solution)
    x = lam @ Q
    return SolveOutcome(
        Status.OPTIMAL, float(obj @ x), tuple(float(v) + 0.0 for v in x), out.iterations
    )
