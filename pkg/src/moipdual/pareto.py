"""Vector orders, nondominance filters and the Pareto set-ordering.

Objective vectors are plain sequences of floats (tuples or 1-d arrays).  Sets of
objective vectors are either raw collections (anything convertible to an
``(N, k)`` array) or :class:`ExtendedSet` values, which add the two symbols
``PLUS_MINF`` and ``MINUS_MINF`` standing for unbounded and infeasible outcomes.

All comparisons use the absolute tolerance :data:`EPS_DOM`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import DimensionError, PreconditionError

EPS_DOM = 1e-9

# Rows of the pairwise comparison matrix are processed in blocks of this many
# elements to bound memory.
_BLOCK = 2_000_000


class Relation(enum.Enum):
    """Outcome of comparing two vectors componentwise."""

    LT = "<"  # every component strictly smaller
    LEQ_STRICTLY_MIXED = "<="  # x <= y, x != y, but not every component strictly smaller
    EQ = "="
    INCOMPARABLE = "<>"
    GT = ">"
    GEQ_MIXED = ">="


class Kind(enum.Enum):
    FINITE = "finite"
    PLUS_MINF = "+M"
    MINUS_MINF = "-M"


def _clean(value: float) -> float:
    # collapse -0.0 so that serialization and equality stay canonical
    return float(value) + 0.0


@dataclass(frozen=True)
class ExtendedSet:
    """An antichain of objective vectors, or one of the symbols ``±M∞``.

    Build finite values with :meth:`finite`; the constructor does not validate.
    Points are kept in ascending lexicographic order.
    """

    kind: Kind
    points: tuple[tuple[float, ...], ...] = ()

    @classmethod
    def finite(cls, points, *, tol: float = EPS_DOM, check: bool = True) -> "ExtendedSet":
        arr = as_points(points)
        if arr.shape[0] == 0:
            raise PreconditionError("a finite extended set must be nonempty")
        if check and not is_antichain(arr, tol=tol):
            raise PreconditionError("points do not form an antichain")
        tuples = sorted({tuple(_clean(v) for v in row) for row in arr})
        return cls(Kind.FINITE, tuple(tuples))

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.FINITE

    @property
    def dim(self) -> int | None:
        return len(self.points[0]) if self.points else None

    def as_array(self) -> np.ndarray:
        if not self.is_finite:
            raise PreconditionError(f"{self.kind.value}M∞ has no points")
        return np.array(self.points, dtype=float)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def contains(self, z: Sequence[float], tol: float = EPS_DOM) -> bool:
        if not self.is_finite:
            return False
        z = np.asarray(z, dtype=float)
        return bool(np.any(np.all(np.abs(self.as_array() - z) <= tol, axis=1)))

    def isclose(self, other: "ExtendedSet", tol: float = EPS_DOM) -> bool:
        """Set equality up to ``tol`` in every coordinate."""
        if self.kind is not other.kind:
            return False
        if not self.is_finite:
            return True
        if len(self) != len(other):
            return False
        return all(other.contains(p, tol) for p in self.points) and all(
            self.contains(p, tol) for p in other.points
        )

    def __repr__(self) -> str:
        if self.kind is Kind.PLUS_MINF:
            return "PLUS_MINF"
        if self.kind is Kind.MINUS_MINF:
            return "MINUS_MINF"
        return f"ExtendedSet({list(self.points)})"


PLUS_MINF = ExtendedSet(Kind.PLUS_MINF)
MINUS_MINF = ExtendedSet(Kind.MINUS_MINF)

PointSet = Union[ExtendedSet, np.ndarray, Iterable[Sequence[float]]]


def as_points(points) -> np.ndarray:
    """Return ``points`` as a float array of shape ``(N, k)``."""
    if isinstance(points, ExtendedSet):
        return points.as_array()
    if isinstance(points, np.ndarray):
        arr = points.astype(float, copy=False)
    else:
        rows = [tuple(p) for p in points]
        if not rows:
            return np.zeros((0, 0))
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise DimensionError(f"points have mixed dimensions {sorted(lengths)}")
        arr = np.array(rows, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else np.zeros((0, 0))
    if arr.ndim != 2:
        raise DimensionError("points must form a 2-d array")
    if arr.size and not np.all(np.isfinite(arr)):
        raise PreconditionError("objective vectors must be finite")
    return arr


def vec_leq(x: Sequence[float], y: Sequence[float], tol: float = EPS_DOM) -> Relation:
    """Classify the pair ``(x, y)`` under the componentwise orders."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"cannot compare vectors of shapes {x.shape} and {y.shape}")
    diff = y - x
    if np.all(np.abs(diff) <= tol):
        return Relation.EQ
    if np.all(diff > tol):
        return Relation.LT
    if np.all(diff < -tol):
        return Relation.GT
    if np.all(diff >= -tol):
        return Relation.LEQ_STRICTLY_MIXED
    if np.all(diff <= tol):
        return Relation.GEQ_MIXED
    return Relation.INCOMPARABLE


def weakly_leq(x, y, tol: float = EPS_DOM) -> bool:
    """``x ≦ y`` up to tolerance."""
    return bool(np.all(np.asarray(x, float) <= np.asarray(y, float) + tol))


def dominated_leq(x, y, tol: float = EPS_DOM) -> bool:
    """``x ≤ y``: weakly below and not equal."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    return bool(np.all(x <= y + tol) and np.any(np.abs(x - y) > tol))


def _max_indices(arr: np.ndarray, tol: float) -> np.ndarray:
    """Indices of a maximal antichain of ``arr`` (duplicates within tol collapsed)."""
    n, k = arr.shape
    keys = tuple(-arr[:, i] for i in reversed(range(k)))
    order = np.lexsort(keys)  # descending lexicographic
    srt = arr[order]
    if k == 1:
        return order[:1]
    if k == 2:
        # A point survives the sweep only if it beats every earlier second
        # coordinate; earlier points already have a first coordinate at least
        # as large, so the sweep only ever discards (near-)dominated points.
        prev = np.maximum.accumulate(srt[:, 1])
        prev = np.concatenate(([-np.inf], prev[:-1]))
        cand = order[srt[:, 1] > prev + tol]
    else:
        kept: list[int] = []
        kept_arr = np.zeros((0, k))
        for idx in order:
            p = arr[idx]
            if kept_arr.shape[0] and np.any(np.all(kept_arr >= p - tol, axis=1)):
                continue
            kept.append(idx)
            kept_arr = np.vstack([kept_arr, p])
        cand = np.array(kept, dtype=int)
    # cleanup pass for tolerance-order effects
    sub = arr[cand]
    ge = np.all(sub[None, :, :] >= sub[:, None, :] - tol, axis=2)  # ge[i, j]: sub[j] >= sub[i]
    strict = np.any(sub[None, :, :] > sub[:, None, :] + tol, axis=2)
    dominated = np.any(ge & strict, axis=1)
    return cand[~dominated]


def max_filter(points: PointSet, tol: float = EPS_DOM) -> ExtendedSet:
    """Points nondominated from above; empty input gives ``MINUS_MINF``."""
    if isinstance(points, ExtendedSet) and not points.is_finite:
        return points
    arr = as_points(points)
    if arr.shape[0] == 0:
        return MINUS_MINF
    idx = _max_indices(arr, tol)
    return ExtendedSet.finite(arr[idx], check=False)


def min_filter(points: PointSet, tol: float = EPS_DOM) -> ExtendedSet:
    """Points nondominated from below; empty input gives ``PLUS_MINF``."""
    if isinstance(points, ExtendedSet) and not points.is_finite:
        return points
    arr = as_points(points)
    if arr.shape[0] == 0:
        return PLUS_MINF
    idx = _max_indices(-arr, tol)
    return ExtendedSet.finite(arr[idx], check=False)


def nondominated(points: PointSet, direction: str = "max", tol: float = EPS_DOM) -> ExtendedSet:
    """Direction-flagged filter: ``"max"`` or ``"min"``."""
    if direction == "max":
        return max_filter(points, tol)
    if direction == "min":
        return min_filter(points, tol)
    raise PreconditionError(f"unknown direction {direction!r}")


def is_antichain(points: PointSet, tol: float = EPS_DOM) -> bool:
    """True iff no two distinct points are comparable under ``≤``."""
    arr = as_points(points)
    n = arr.shape[0]
    if n == 0:
        raise PreconditionError("is_antichain needs a nonempty set")
    step = max(1, _BLOCK // max(1, n * arr.shape[1]))
    for lo in range(0, n, step):
        blk = arr[lo : lo + step]
        le = np.all(blk[:, None, :] <= arr[None, :, :] + tol, axis=2)
        differ = np.any(np.abs(blk[:, None, :] - arr[None, :, :]) > tol, axis=2)
        if np.any(le & differ):
            return False
    return True


def preceq(S: PointSet, T: PointSet, tol: float = EPS_DOM) -> bool:
    """The Pareto set-ordering ``S ⪯ T``, extended to ``±M∞``.

    ``S`` and ``T`` may be any nonempty finite sets; only results stored as
    :class:`ExtendedSet` need to be antichains.
    """
    s_ext = isinstance(S, ExtendedSet)
    t_ext = isinstance(T, ExtendedSet)
    if s_ext and S.kind is Kind.MINUS_MINF:
        return True
    if t_ext and T.kind is Kind.PLUS_MINF:
        return True
    if t_ext and T.kind is Kind.MINUS_MINF:
        return False
    if s_ext and S.kind is Kind.PLUS_MINF:
        return False
    s = as_points(S)
    t = as_points(T)
    if s.shape[0] == 0 or t.shape[0] == 0:
        raise PreconditionError("the set order is defined for nonempty sets")
    if s.shape[1] != t.shape[1]:
        raise DimensionError(f"dimension mismatch {s.shape[1]} vs {t.shape[1]}")
    step = max(1, _BLOCK // max(1, t.shape[0] * t.shape[1]))
    for lo in range(0, s.shape[0], step):
        blk = s[lo : lo + step]
        # (i) every s has some t with s ≦ t
        covered = np.all(blk[:, None, :] <= t[None, :, :] + tol, axis=2)
        if not np.all(np.any(covered, axis=1)):
            return False
        # (ii) no t ≤ s
        below = np.all(t[None, :, :] <= blk[:, None, :] + tol, axis=2)
        differ = np.any(np.abs(t[None, :, :] - blk[:, None, :]) > tol, axis=2)
        if np.any(below & differ):
            return False
    return True


def minkowski_sum(S: PointSet, T: PointSet) -> np.ndarray:
    """All pairwise sums ``s + t`` as an ``(|S|·|T|, k)`` array."""
    s = as_points(S)
    t = as_points(T)
    if s.shape[1] != t.shape[1]:
        raise DimensionError(f"dimension mismatch {s.shape[1]} vs {t.shape[1]}")
    return (s[:, None, :] + t[None, :, :]).reshape(-1, s.shape[1])
