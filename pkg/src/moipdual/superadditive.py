"""Value-function sampling, the lattice superadditive dual and hyperplane families."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import (
    InfeasibleError,
    PreconditionError,
    UnboundedError,
    UnsupportedDimensionError,
)
from .model import MoipInstance, _implied_upper, nondominated_set, scalarize, supported_frontier
from .pareto import EPS_DOM, ExtendedSet
from .solvers import LpProblem, Sense, Status, ip_solve, lp_solve

LATTICE_CAP = 100_000
# Above this many rows the dense tableau gets slow (seconds per solve), so auto mode hands off to HiGHS.
DENSE_ROW_CAP = 400


def value_function_sample(inst: MoipInstance, betas: Sequence) -> dict:
    """``β -> Max{Cx : Ax <= β}`` for each right-hand side."""
    out = {}
    for beta in betas:
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        out[tuple(float(v) for v in beta)] = nondominated_set(inst.with_rhs(beta))
    return out


def _integral(a: np.ndarray) -> bool:
    return bool(np.all(a == np.round(a)))


@dataclass(frozen=True)
class SdmolpProgram:
    """Lattice LP whose variables are ``f_i(d)`` for ``0 <= d <= b``.

    Constraints are identical across objectives except for the column
    bounds ``f_i(A_j) >= c_ij``, so they are stored once.
    """

    lattice: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]
    columns: tuple[tuple[int, int], ...]  # (variable j, lattice index of A_j)
    pairs: tuple[tuple[int, int, int], ...]  # (d1, d2, d1 + d2) as lattice indices
    C: np.ndarray

    @property
    def k(self) -> int:
        return self.C.shape[0]

    @property
    def size(self) -> int:
        return len(self.lattice)

    def index(self, d) -> int:
        return _lattice_index(tuple(int(v) for v in d), self.rhs)

    def problem(self, i: int) -> LpProblem:
        """The LP for objective ``i``: minimize ``f_i(b)``."""
        N = self.size
        obj = [0.0] * N
        obj[N - 1] = 1.0
        rows = []
        for j, col in self.columns:
            a = [0.0] * N
            a[col] = 1.0
            rows.append((a, ">=", float(self.C[i, j])))
        for p, q, r in self.pairs:
            a = [0.0] * N
            a[p] += 1.0
            a[q] += 1.0
            a[r] -= 1.0
            rows.append((a, "<=", 0.0))
        bounds = [(0.0, 0.0)] + [(0.0, math.inf)] * (N - 1)
        return LpProblem(obj, rows, Sense.MIN, bounds)

    def var_name(self, i: int, idx: int) -> str:
        return "f_" + str(i) + "_" + "_".join(str(v) for v in self.lattice[idx])

    def to_lp_text(self) -> str:
        """All ``k`` programs in CPLEX LP text format, objective ``Σ_i f_i(b)``."""
        N = self.size
        lines = ["\\ superadditive dual lattice program", "Minimize"]
        lines.append(" obj: " + " + ".join(self.var_name(i, N - 1) for i in range(self.k)))
        lines.append("Subject To")
        c = 0
        for i in range(self.k):
            for j, col in self.columns:
                lines.append(f" c{c}: {self.var_name(i, col)} >= {_num(self.C[i, j])}")
                c += 1
            for p, q, r in self.pairs:
                left = (
                    f"2 {self.var_name(i, p)}" if p == q
                    else f"{self.var_name(i, p)} + {self.var_name(i, q)}"
                )
                lines.append(f" c{c}: {left} - {self.var_name(i, r)} <= 0")
                c += 1
        lines.append("Bounds")
        for i in range(self.k):
            lines.append(f" {self.var_name(i, 0)} = 0")
            for idx in range(1, N):
                lines.append(f" {self.var_name(i, idx)} >= 0")
        lines.append("End")
        return "\n".join(lines) + "\n"


def _num(v: float) -> str:
    v = float(v)
    return str(int(v)) if v == int(v) else repr(v)


def _lattice_index(d: tuple, b: tuple) -> int:
    idx = 0
    for di, bi in zip(d, b):
        idx = idx * (bi + 1) + di
    return idx


def _dual_rows(inst: MoipInstance) -> tuple[np.ndarray, np.ndarray]:
    """Rows of the primal seen by the dual: ``A`` plus box rows tighter than ``A`` implies."""
    implied = _implied_upper(inst.A, inst.b, inst.lower, np.full(inst.n, np.inf), range(inst.m))
    A, b = [inst.A], [inst.b]
    for j in range(inst.n):
        if np.isfinite(inst.upper[j]) and inst.upper[j] < implied[j]:
            row = np.zeros((1, inst.n))
            row[0, j] = 1.0
            A.append(row)
            b.append([inst.upper[j]])
    return np.vstack(A), np.concatenate(b)


def build_sdmolp(inst: MoipInstance, cap: int = LATTICE_CAP) -> SdmolpProgram:
    """Lattice program for ``max Cx, Ax <= b, x ∈ Z^n_≥``.

    Finite upper bounds that the rows do not already imply are appended as
    rows ``x_j <= u_j`` so the dual sees the same feasible set.
    """
    if np.any(inst.lower != 0):
        raise PreconditionError("the lattice dual needs lower bounds of zero")
    A, b = _dual_rows(inst)
    if np.any(A < 0) or np.any(b < 0) or not _integral(A) or not _integral(b):
        raise PreconditionError("A and b must be nonnegative integers")
    rhs = tuple(int(v) for v in b)
    size = math.prod(v + 1 for v in rhs)
    if size > cap:
        raise PreconditionError(f"lattice has {size} points, above the cap {cap}")
    lattice = tuple(itertools.product(*(range(v + 1) for v in rhs)))
    L = np.array(lattice, dtype=np.int64).reshape(size, len(rhs))
    bvec = np.array(rhs, dtype=np.int64)
    columns = []
    for j in range(inst.n):
        a = A[:, j].astype(np.int64)
        if np.any(a > bvec):
            continue  # x_j = 0 in every feasible point
        if not np.any(a):
            if np.any(inst.C[:, j] > 0):
                raise UnboundedError(
                    f"column {j} is zero with a positive objective coefficient; the dual is infeasible"
                )
            continue
        columns.append((j, _lattice_index(tuple(int(v) for v in a), rhs)))
    strides = np.array([math.prod(v + 1 for v in rhs[t + 1 :]) for t in range(len(rhs))],
                       dtype=np.int64)
    pairs = []
    for p in range(1, size):
        # unordered pairs: q runs over indices >= p with L[p] + L[q] <= b
        fit = np.flatnonzero(np.all(L[p:] <= bvec - L[p], axis=1)) + p
        sums = (L[fit] + L[p]) @ strides
        pairs.extend(zip([p] * fit.size, fit.tolist(), sums.tolist()))
    return SdmolpProgram(lattice, rhs, tuple(columns), tuple(pairs), inst.C.copy())


def _solve_highs(prob: LpProblem) -> float:
    from scipy.optimize import linprog

    c, A, rel, rhs, lo, hi = prob.arrays()
    ub = [i for i, r in enumerate(rel) if r == "<="]
    lb = [i for i, r in enumerate(rel) if r == ">="]
    A_ub = np.vstack([A[ub], -A[lb]]) if (ub or lb) else None
    b_ub = np.concatenate([rhs[ub], -rhs[lb]]) if (ub or lb) else None
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=list(zip(lo, [None if not np.isfinite(h) else h for h in hi])),
                  method="highs")
    if res.status == 2:
        raise UnboundedError("the dual program is infeasible")
    if res.status != 0:
        from .exceptions import NumericalError

        raise NumericalError(f"HiGHS failed: {res.message}")
    return float(res.fun)


def vsdp_solve(inst: MoipInstance, backend: str = "auto", cap: int = LATTICE_CAP) -> np.ndarray:
    """The unique nondominated point ``(f_1(b), …, f_k(b))`` of the vector dual.

    ``backend`` is ``"simplex"`` (built-in dense simplex), ``"highs"`` (scipy)
    or ``"auto"`` (simplex unless the program is large).
    """
    prog = build_sdmolp(inst, cap)
    rows = len(prog.columns) + len(prog.pairs)
    if backend == "auto":
        backend = "simplex" if rows <= DENSE_ROW_CAP else "highs"
    out = np.zeros(prog.k)
    for i in range(prog.k):
        prob = prog.problem(i)
        if backend == "highs":
            out[i] = _solve_highs(prob)
            continue
        if backend != "simplex":
            raise PreconditionError(f"unknown backend {backend!r}")
        res = lp_solve(prob)
        if res.status is Status.INFEASIBLE:
            raise UnboundedError("the dual program is infeasible, so the primal objective is unbounded")
        out[i] = res.value
    return out + 0.0


@dataclass(frozen=True)
class HyperplaneFamily:
    """Entries ``(μ, f)`` standing for hyperplanes ``{w : μᵀw = f}`` with ``μ > 0``."""

    entries: tuple[tuple[tuple[float, ...], float], ...]

    def __post_init__(self):
        if not self.entries:
            raise PreconditionError("a hyperplane family needs at least one entry")
        seen = {}
        for mu, f in self.entries:
            mu = np.asarray(mu, dtype=float)
            if np.any(mu <= 0):
                raise PreconditionError("hyperplane normals must be strictly positive")
            s = mu.sum()
            key = (tuple(np.round(mu / s, 12)), round(f / s, 12))
            seen.setdefault(key, (tuple(float(v) for v in mu), float(f)))
        object.__setattr__(self, "entries", tuple(seen.values()))

    @property
    def normals(self) -> np.ndarray:
        return np.array([mu for mu, _ in self.entries], dtype=float)

    @property
    def offsets(self) -> np.ndarray:
        return np.array([f for _, f in self.entries], dtype=float)

    def __len__(self) -> int:
        return len(self.entries)


def scalar_dual_family(inst: MoipInstance) -> HyperplaneFamily:
    """One hyperplane per dichotomic weight, offset by the scalarized IP optimum."""
    if inst.k == 1:
        weights = [(1.0,)]
    elif inst.k == 2:
        front = supported_frontier(inst)
        if not front.ok:
            raise InfeasibleError("the instance is infeasible")
        weights = list(front.weights)
    else:
        raise UnsupportedDimensionError("hyperplane families are built for k <= 2")
    entries = []
    for mu in weights:
        res = ip_solve(scalarize(inst, mu))
        if not res.optimal:
            raise InfeasibleError("the instance is infeasible")
        entries.append((tuple(mu), float(res.value)))
    return HyperplaneFamily(tuple(entries))


def fstar_contains(z, fam: HyperplaneFamily, tol: float = EPS_DOM) -> bool:
    """Membership of ``z`` in ``Min`` of the union of the family's hyperplanes."""
    z = np.asarray(z, dtype=float)
    s = fam.normals @ z
    f = fam.offsets
    return bool(np.all(s <= f + tol) and np.any(np.abs(s - f) <= tol))


def verify_strong_sdp(inst: MoipInstance, tol: float = 1e-9) -> bool:
    """Every supported efficient image lies in the family's set-valued dual."""
    fam = scalar_dual_family(inst)
    if inst.k == 1:
        nd = nondominated_set(inst)
        return all(fstar_contains(y, fam, tol) for y in nd.points)
    front = supported_frontier(inst)
    return all(fstar_contains(e.y, fam, tol * max(1.0, abs(max(e.y, key=abs)))) for e in front.entries)
