"""Lower and upper bound sets and the scaled-distance quality metric."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import PreconditionError, UnsupportedDimensionError
from .model import Frontier, MoipInstance, nondominated_set, supported_frontier
from .pareto import EPS_DOM, ExtendedSet, as_points, preceq
from .relaxations import MultiplierGrid, dual_approx

SAMPLE_FACTOR = 0.05


class Method(enum.Enum):
    LAGRANGIAN = "lagrangian"
    CONVEX_HULL = "ch"


@dataclass(frozen=True)
class BoundReport:
    """One bound computation.

    ``U`` is the point set entering the metric.  For the convex hull bound it
    is the chain discretization described by ``discretization``.
    """

    L: tuple[tuple[float, ...], ...]
    U: ExtendedSet
    d: float
    gamma: float
    strong: bool
    method: Method
    discretization: str = "points"

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "d": self.d,
            "gamma": self.gamma,
            "strong": self.strong,
            "L": [list(p) for p in self.L],
            "U": [list(p) for p in self.U.points],
            "discretization": self.discretization,
        }


def local_nadir_lower_bound(frontier) -> np.ndarray:
    """Componentwise minima of adjacent supported points (k = 2)."""
    P = frontier.points() if isinstance(frontier, Frontier) else as_points(frontier)
    if P.shape[0] == 0:
        raise PreconditionError("the frontier has no points")
    if P.shape[1] != 2:
        raise UnsupportedDimensionError("local nadir points are defined for k = 2")
    P = P[np.argsort(P[:, 0], kind="stable")]
    if P.shape[0] == 1:
        return P.copy()
    return np.minimum(P[:-1], P[1:])


def scaling(L, U, union: str = "set") -> float:
    """Mean Euclidean norm over ``L ∪ U``.

    ``union="set"`` collapses exact duplicates; ``"multiset"`` keeps them.
    """
    pts = np.concatenate([as_points(L), as_points(U)], axis=0)
    if union == "set":
        pts = np.unique(pts, axis=0)
    elif union != "multiset":
        raise PreconditionError(f"unknown union mode {union!r}")
    gamma = float(np.linalg.norm(pts, axis=1).mean())
    if gamma == 0.0:
        raise PreconditionError("scaling is zero: every point sits at the origin")
    return gamma


def bound_quality(L, U, union: str = "set") -> tuple[float, float]:
    """Return ``(d, gamma)`` with ``d = max_ℓ min_u ||u − ℓ|| / gamma``."""
    Lp, Up = as_points(L), as_points(U)
    if Lp.shape[0] == 0 or Up.shape[0] == 0:
        raise PreconditionError("both L and U must be nonempty")
    gamma = scaling(Lp, Up, union)
    worst = 0.0
    step = max(1, 1_000_000 // max(1, Up.shape[0]))
    for s in range(0, Lp.shape[0], step):
        blk = Lp[s : s + step]
        dist = np.linalg.norm(Up[None, :, :] - blk[:, None, :], axis=2).min(axis=1)
        worst = max(worst, float(dist.max()))
    return worst / gamma, gamma


def is_strong_upper_bound(U, nd: ExtendedSet, tol: float = EPS_DOM) -> bool:
    """``Max(Y) ⊆ U`` up to tolerance."""
    if not isinstance(nd, ExtendedSet) or not nd.is_finite:
        raise PreconditionError("the nondominated set must be finite")
    Up = as_points(U)
    if Up.shape[0] == 0:
        return False
    P = nd.as_array()
    hit = np.all(np.abs(P[:, None, :] - Up[None, :, :]) <= tol, axis=2)
    return bool(np.all(np.any(hit, axis=1)))


def halfspace_union_check(z, feasible_values, tol: float = EPS_DOM) -> bool:
    """For every ``y``, some ``z_i >= y_i``."""
    z = np.asarray(z, dtype=float)
    Y = as_points(feasible_values)
    if Y.shape[0] == 0:
        return True
    if Y.shape[1] != z.shape[0]:
        raise PreconditionError("dimension mismatch")
    return bool(np.all(np.any(z[None, :] >= Y - tol, axis=1)))


def upper_bound_violations(U, feasible_values, tol: float = EPS_DOM) -> np.ndarray:
    """Rows of ``U`` strictly dominated by some feasible value."""
    Up = as_points(U)
    Y = as_points(feasible_values)
    if Up.shape[0] == 0 or Y.shape[0] == 0:
        return np.zeros((0, Up.shape[1] if Up.ndim == 2 else 0))
    ge = np.all(Y[None, :, :] >= Up[:, None, :] - tol, axis=2)
    gt = np.any(Y[None, :, :] > Up[:, None, :] + tol, axis=2)
    return Up[np.any(ge & gt, axis=1)]


def lower_bound_valid(L, nd: ExtendedSet, tol: float = EPS_DOM) -> bool:
    """Each ``ℓ`` satisfies ``{ℓ} ⪯ Max(Y)``."""
    return all(preceq([tuple(l)], nd, tol) for l in as_points(L))


def _report(method, L, U_pts, nd, strong_against, discretization) -> BoundReport:
    d, gamma = bound_quality(L, U_pts)
    U = ExtendedSet.finite(U_pts, check=False)
    return BoundReport(
        tuple(tuple(float(v) + 0.0 for v in p) for p in L),
        U,
        d,
        gamma,
        is_strong_upper_bound(strong_against, nd),
        method,
        discretization,
    )


def lagrangian_bound_report(inst: MoipInstance, grid: MultiplierGrid, frontier: Frontier | None = None) -> BoundReport:
    frontier = frontier or supported_frontier(inst)
    L = local_nadir_lower_bound(frontier)
    U = dual_approx(inst, grid).as_array()
    return _report(Method.LAGRANGIAN, L, U, nondominated_set(inst), U, "points")


def ch_bound_report(inst: MoipInstance, frontier: Frontier | None = None,
                    factor: float = SAMPLE_FACTOR) -> BoundReport:
    """Convex hull bound; the chain is sampled at spacing ``factor·γ0``.

    ``γ0`` is the scaling of the local nadir points and the chain vertices.
    Strength is judged on the chain's points, not on the samples.
    """
    frontier = frontier or supported_frontier(inst)
    L = local_nadir_lower_bound(frontier)
    ext = frontier.extreme_points()
    spacing = factor * scaling(L, ext)
    U = frontier.sample(spacing)
    desc = f"chain vertices plus segment samples at spacing {factor}*gamma0 = {spacing:.6g}"
    return _report(Method.CONVEX_HULL, L, U, nondominated_set(inst), frontier.points(), desc)
