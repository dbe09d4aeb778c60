"""Continuous, convex-hull and Lagrangian relaxations and the grid dual bound."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import (
    DimensionError,
    InfeasibleError,
    PreconditionError,
    UnsupportedDimensionError,
)
from .model import Frontier, MoipInstance, lp_relaxation_frontier, supported_frontier, _check_weight
from .pareto import EPS_DOM, MINUS_MINF, ExtendedSet, _max_indices, as_points, max_filter, min_filter
from .solvers import LpProblem, Sense, Status, conv_hull_lp, lp_solve

FR_LAG_TOL = 1e-6

# Batched relaxations materialize G·P²·k booleans per block; above _BATCH_MAX_Q
# points the sort-based filter per multiplier is faster.
_BATCH_ELEMS = 4_000_000
_BATCH_MAX_Q = 64


@dataclass(frozen=True)
class MultiplierMatrix:
    """Nonnegative ``k × m1`` Lagrange multipliers."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise PreconditionError("multipliers must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, inst: MoipInstance, values) -> "MultiplierMatrix":
        """Shape ``values`` (flat or matrix, row-major) for ``inst``."""
        m1 = len(inst.dualized)
        v = np.asarray(values, dtype=float)
        if v.size != inst.k * m1:
            raise DimensionError(
                f"need {inst.k}×{m1} = {inst.k * m1} multipliers, got {v.size}"
            )
        return cls(v.reshape(inst.k, m1))


class MultiplierGrid:
    """Equally spaced multipliers on ``[0, λ_max]`` for each of the ``k·m1`` entries.

    ``lam_max`` and ``count`` may be scalars or one value per entry.  A grid
    can also be an explicit list of matrices via :meth:`from_matrices`.
    """

    def __init__(self, k: int, m1: int, lam_max=2.5, count=51):
        size = k * m1
        self.k, self.m1 = k, m1
        lam = np.broadcast_to(np.asarray(lam_max, dtype=float), (size,)).copy()
        cnt = np.broadcast_to(np.asarray(count, dtype=int), (size,)).copy()
        if np.any(cnt < 1):
            raise PreconditionError("grid counts must be at least 1")
        if np.any(lam <= 0):
            raise PreconditionError("grid upper bounds must be positive")
        self.lam_max, self.count = lam, cnt
        self._axes = [np.linspace(0.0, l, c) if c > 1 else np.zeros(1) for l, c in zip(lam, cnt)]
        self._explicit: np.ndarray | None = None

    @classmethod
    def for_instance(cls, inst: MoipInstance, lam_max=2.5, count=51) -> "MultiplierGrid":
        return cls(inst.k, len(inst.dualized), lam_max, count)

    @classmethod
    def from_matrices(cls, matrices: Iterable) -> "MultiplierGrid":
        mats = [np.atleast_2d(np.asarray(m, dtype=float)) for m in matrices]
        if not mats:
            raise PreconditionError("a grid needs at least one multiplier matrix")
        k, m1 = mats[0].shape
        if any(m.shape != (k, m1) for m in mats):
            raise DimensionError("all multiplier matrices must share a shape")
        for m in mats:
            MultiplierMatrix(m)
        g = cls.__new__(cls)
        g.k, g.m1 = k, m1
        g.lam_max = np.max([m.reshape(-1) for m in mats], axis=0) if k * m1 else np.zeros(0)
        g.count = np.ones(k * m1, dtype=int)
        g._axes = []
        g._explicit = np.array(mats)
        return g

    def __len__(self) -> int:
        if self._explicit is not None:
            return self._explicit.shape[0]
        return int(np.prod(self.count)) if self.k * self.m1 else 1

    def array(self) -> np.ndarray:
        """All grid matrices as a ``(G, k, m1)`` array, first entry varying slowest."""
        if self._explicit is not None:
            return self._explicit
        if self.k * self.m1 == 0:
            return np.zeros((1, self.k, self.m1))
        mesh = np.meshgrid(*self._axes, indexing="ij")
        flat = np.stack([m.reshape(-1) for m in mesh], axis=1)
        return flat.reshape(-1, self.k, self.m1)

    def __iter__(self) -> Iterator[MultiplierMatrix]:
        for lam in self.array():
            yield MultiplierMatrix(lam)


def _lambda_array(inst: MoipInstance, lam) -> np.ndarray:
    if isinstance(lam, MultiplierMatrix):
        v = lam.values
    else:
        v = MultiplierMatrix.of(inst, lam).values
    m1 = len(inst.dualized)
    if m1 == 0:
        return np.zeros((inst.k, 0))
    if v.shape != (inst.k, m1):
        if v.size == inst.k * m1:
            return v.reshape(inst.k, m1)
        raise DimensionError(f"multipliers must be {inst.k}×{m1}, got {v.shape}")
    return v


def lr_values(inst: MoipInstance, lam) -> np.ndarray:
    """Objective vectors ``Cx + Λ(b¹ − A¹x)`` over all of ``Q``."""
    L = _lambda_array(inst, lam)
    Q = inst.q_points
    shifted = inst.C - L @ inst.A1
    return Q @ shifted.T + L @ inst.b1


def lagrangian_relaxation(inst: MoipInstance, lam) -> ExtendedSet:
    """``Max`` of the relaxation ``LR(Λ)``; ``MINUS_MINF`` when ``Q`` is empty."""
    vals = lr_values(inst, lam)
    if vals.shape[0] == 0:
        return MINUS_MINF
    return max_filter(vals)


def _batch_max_members(V: np.ndarray, tol: float) -> np.ndarray:
    """``mask[g, i]``: point i is nondominated within batch g (duplicates all kept)."""
    ge = np.all(V[:, None, :, :] >= V[:, :, None, :] - tol, axis=3)  # ge[g,i,j]: V[g,j] >= V[g,i]
    gt = np.any(V[:, None, :, :] > V[:, :, None, :] + tol, axis=3)
    return ~np.any(ge & gt, axis=2)


def lr_member_blocks(inst: MoipInstance, lambdas, tol: float = EPS_DOM):
    """Yield ``(Λ block, values, mask)`` with ``values`` of shape ``(g, |Q|, k)``.

    ``mask[g, p]`` marks the points of ``Max(Y_LR(Λ_g))`` (every preimage of a
    nondominated value is kept).  Whole blocks stay vectorized, which is what
    large grid sweeps over a small ``Q`` need.
    """
    L = np.asarray(lambdas.array() if isinstance(lambdas, MultiplierGrid) else lambdas, float)
    if L.ndim == 2:
        L = L[None]
    Q = inst.q_points
    P, k = Q.shape[0], inst.k
    if P == 0:
        yield L, np.zeros((L.shape[0], 0, k)), np.zeros((L.shape[0], 0), dtype=bool)
        return
    base = Q @ inst.C.T  # P x k
    slack = inst.b1[None, :] - Q @ inst.A1.T  # P x m1
    if P > _BATCH_MAX_Q:
        for lam in L:
            vals = base + slack @ lam.T
            mask = np.zeros(P, dtype=bool)
            mask[_max_indices(vals, tol)] = True
            yield lam[None], vals[None], mask[None]
        return
    block = max(1, _BATCH_ELEMS // (P * P * k))
    for s in range(0, L.shape[0], block):
        lb = L[s : s + block]
        V = base[None] + np.einsum("pm,gkm->gpk", slack, lb)
        yield lb, V, _batch_max_members(V, tol)


def lagrangian_relaxation_batch(inst: MoipInstance, lambdas, tol: float = EPS_DOM):
    """Yield ``(Λ, Max(Y_LR(Λ)) as array)`` for every matrix in ``lambdas``.

    Small ``Q`` are processed with vectorized dominance checks over blocks of
    multipliers; larger ones fall back to one filter per multiplier.
    """
    for lb, V, mask in lr_member_blocks(inst, lambdas, tol):
        for g in range(lb.shape[0]):
            yield lb[g], V[g][mask[g]]


def dual_approx(inst: MoipInstance, grid, tol: float = EPS_DOM) -> ExtendedSet:
    """``Min`` of the union of ``Max(Y_LR(Λ))`` over the grid."""
    if isinstance(grid, MultiplierGrid):
        if len(grid) == 0:
            raise PreconditionError("the multiplier grid is empty")
        lambdas = grid.array()
    else:
        lambdas = np.array([_lambda_array(inst, g) for g in grid])
        if lambdas.shape[0] == 0:
            raise PreconditionError("the multiplier grid is empty")
    if inst.q_points.shape[0] == 0:
        return MINUS_MINF
    parts = [V[mask] for _, V, mask in lr_member_blocks(inst, lambdas, tol)]
    union = np.concatenate(parts, axis=0)
    # exact duplicates go here; near-duplicates collapse inside min_filter
    union = np.unique(union, axis=0)
    return min_filter(union, tol)


def molp_relaxation_frontier(inst: MoipInstance) -> Frontier:
    """Extreme nondominated points of the continuous relaxation (k = 2)."""
    if inst.k != 2:
        raise UnsupportedDimensionError("MOLP frontiers are implemented for k = 2")
    rows = inst.rows()
    bounds = list(zip(inst.lower, inst.upper))
    C = inst.C

    def solve(mu, floors):
        extra = [(list(C[i]), ">=", float(v)) for i, v in floors]
        out = lp_solve(LpProblem(list(np.asarray(mu) @ C), rows + extra, Sense.MAX, bounds))
        if not out.optimal:
            return out.status, None, None
        x = np.asarray(out.solution)
        return out.status, tuple(out.solution), tuple(C @ x)

    return lp_relaxation_frontier(solve)


def ch_relaxation_frontier(inst: MoipInstance) -> Frontier:
    """The chain through the supported nondominated points (k = 2)."""
    return supported_frontier(inst)


def ldlp_bound(inst: MoipInstance) -> Frontier:
    """Extreme points of the MOLP over ``conv(Q) ∩ {A¹x <= b¹}`` (k = 2)."""
    if inst.k != 2:
        raise UnsupportedDimensionError("LDLP frontiers are implemented for k = 2")
    Q = inst.q_points
    if Q.shape[0] == 0:
        return Frontier((), "infeasible")
    C = inst.C
    rows = inst.rows(inst.dualized)

    def solve(mu, floors):
        extra = [(list(C[i]), ">=", float(v)) for i, v in floors]
        out = conv_hull_lp(Q, np.asarray(mu) @ C, rows + extra)
        if not out.optimal:
            return out.status, None, None
        x = np.asarray(out.solution)
        return out.status, tuple(out.solution), tuple(C @ x)

    return lp_relaxation_frontier(solve)


def scalarized_dual_value(inst: MoipInstance, mu) -> float:
    """Common value of the scalarized Lagrangian dual for weight ``mu``."""
    mu = _check_weight(mu, inst.k)
    Q = inst.q_points
    if Q.shape[0] == 0:
        raise InfeasibleError("Q is empty")
    out = conv_hull_lp(Q, mu @ inst.C, inst.rows(inst.dualized))
    if out.status is Status.INFEASIBLE:
        raise InfeasibleError("conv(Q) does not meet the dualized rows; the dual is unbounded below")
    return float(out.value)


def lr_scalar_value(inst: MoipInstance, mu, lam) -> float:
    """``max_{x∈Q} μᵀ(Cx + Λ(b¹ − A¹x))``."""
    mu = _check_weight(mu, inst.k)
    vals = lr_values(inst, lam)
    if vals.shape[0] == 0:
        raise InfeasibleError("Q is empty")
    return float((vals @ mu).max())


@dataclass(frozen=True)
class FrLagResult:
    violated: bool
    direction: tuple[float, ...] | None = None
    gap: float = 0.0
    h1: float | None = None
    h2: float | None = None


def check_fr_lag(inst: MoipInstance, directions: Sequence, tol: float = FR_LAG_TOL) -> FrLagResult:
    """Falsify ``conv(X) = conv(Q) ∩ {A¹x <= b¹}`` on sampled directions.

    A ``NOT_FALSIFIED`` outcome (``violated`` false) is never a proof.
    """
    X = inst.feasible_points
    Q = inst.q_points
    if X.shape[0] == 0 or Q.shape[0] == 0:
        raise InfeasibleError("both X and Q must be nonempty")
    rows = inst.rows(inst.dualized)
    for d in directions:
        d = np.asarray(d, dtype=float)
        if d.shape != (inst.n,):
            raise DimensionError(f"direction must have {inst.n} entries")
        h1 = float((X @ d).max())
        h2 = float(conv_hull_lp(Q, d, rows).value)
        if h2 - h1 > tol:
            return FrLagResult(True, tuple(float(v) for v in d), h2 - h1, h1, h2)
    return FrLagResult(False)


def chain_preceq(S, chain: Frontier, tol: float = 1e-9) -> bool:
    """``S ⪯ T`` where ``T`` is the full piecewise-linear chain (k = 2)."""
    s = as_points(S)
    P = chain.points()
    if P.shape[0] == 0:
        raise PreconditionError("empty chain")
    if s.shape[1] != 2 or P.shape[1] != 2:
        raise UnsupportedDimensionError("chains are biobjective")
    lo1, hi1 = P[0, 0], P[-1, 0]
    for z in s:
        if z[0] > hi1 + tol or z[1] > chain.chain_value(z[0]) + tol:
            return False
        if z[0] >= lo1 - tol:
            t1 = min(z[0], hi1)
            t = np.array([t1, chain.chain_value(t1)])
            if t[1] <= z[1] + tol and np.linalg.norm(t - z) > tol:
                return False
    return True
