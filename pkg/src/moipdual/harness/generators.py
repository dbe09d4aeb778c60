"""Random biobjective knapsack and assignment instances.

Every draw comes from a PCG64 stream keyed by ``(seed, trial, stream)``
through :class:`numpy.random.SeedSequence`, so trials can be generated in any
order or in parallel without changing a single value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import PreconditionError
from ..model import MoipInstance

STREAM_OBJECTIVES = 0
STREAM_ROWS = 1
STREAM_EXTRA = 2


class Problem(enum.Enum):
    KNAPSACK = "knapsack"
    ASSIGNMENT = "assignment"


@dataclass(frozen=True)
class ExperimentConfig:
    problem: Problem = Problem.KNAPSACK
    trials: int = 100
    seed: int = 0
    n_vars: int = 20  # knapsack items
    size: int = 4  # assignment side length
    grid_max: float = 2.5
    grid_count: int | None = None  # default: 26 knapsack, 51 assignment
    objective_range: tuple[int, int] | None = None  # default: (1, 15) knapsack, (1, 20) assignment
    weight_range: tuple[int, int] = (1, 5)
    extra_range: tuple[int, int] = (1, 5)
    rhs_rule: str = "ceil(sum/2)"

    def __post_init__(self):
        if isinstance(self.problem, str):
            object.__setattr__(self, "problem", Problem(self.problem))
        if self.trials < 1:
            raise PreconditionError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise PreconditionError("seed must be a 64-bit unsigned integer")
        for name in ("objective_range", "weight_range", "extra_range"):
            r = getattr(self, name)
            if r is not None and (int(r[0]) != r[0] or int(r[1]) != r[1] or r[0] > r[1]):
                raise PreconditionError(f"{name} must be a nonempty integer interval")
        if self.n_vars < 1 or self.size < 1:
            raise PreconditionError("instance sizes must be positive")

    @property
    def objectives(self) -> tuple[int, int]:
        if self.objective_range is not None:
            return self.objective_range
        return (1, 15) if self.problem is Problem.KNAPSACK else (1, 20)

    @property
    def count(self) -> int:
        if self.grid_count is not None:
            return self.grid_count
        return 26 if self.problem is Problem.KNAPSACK else 51

    def as_dict(self) -> dict:
        return {
            "problem": self.problem.value,
            "trials": self.trials,
            "seed": self.seed,
            "n_vars": self.n_vars,
            "size": self.size,
            "grid_max": self.grid_max,
            "grid_count": self.count,
            "objective_range": list(self.objectives),
            "weight_range": list(self.weight_range),
            "extra_range": list(self.extra_range),
            "rhs_rule": self.rhs_rule,
        }


def rng(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial, stream))))


def _ints(g: np.random.Generator, bounds, shape) -> np.ndarray:
    return g.integers(bounds[0], bounds[1], size=shape, endpoint=True).astype(float)


def _half_sum(row: np.ndarray) -> float:
    return float(math.ceil(row.sum() / 2))


def gen_knapsack(cfg: ExperimentConfig, trial: int) -> MoipInstance:
    """Binary biobjective knapsack with one extra row, which is dualized."""
    n = cfg.n_vars
    C = _ints(rng(cfg.seed, trial, STREAM_OBJECTIVES), cfg.objectives, (2, n))
    w = _ints(rng(cfg.seed, trial, STREAM_ROWS), cfg.weight_range, n)
    e = _ints(rng(cfg.seed, trial, STREAM_EXTRA), cfg.extra_range, n)
    A = np.vstack([w, e])
    b = np.array([_half_sum(w), _half_sum(e)])
    return MoipInstance(C, A, b, np.zeros(n), np.ones(n), (1,), f"knapsack-{cfg.seed}-{trial}")


def gen_assignment(cfg: ExperimentConfig, trial: int) -> MoipInstance:
    """``s × s`` binary assignment (equalities as paired inequalities) plus one dualized row.

    The extra row's rhs is ``ceil(Σ/s)``: the average permutation meets it, so
    some assignment is always feasible.
    """
    s = cfg.size
    n = s * s
    C = _ints(rng(cfg.seed, trial, STREAM_OBJECTIVES), cfg.objectives, (2, n))
    rows, rhs = [], []
    for i in range(s):
        r = np.zeros(n)
        r[i * s : (i + 1) * s] = 1.0
        rows += [r, -r]
        rhs += [1.0, -1.0]
    for j in range(s):
        c = np.zeros(n)
        c[j::s] = 1.0
        rows += [c, -c]
        rhs += [1.0, -1.0]
    e = _ints(rng(cfg.seed, trial, STREAM_EXTRA), cfg.extra_range, n)
    rows.append(e)
    rhs.append(float(math.ceil(e.sum() / s)))
    return MoipInstance(C, np.array(rows), np.array(rhs), np.zeros(n), np.ones(n),
                        (len(rows) - 1,), f"assignment-{cfg.seed}-{trial}")


def generate(cfg: ExperimentConfig, trial: int) -> MoipInstance:
    if cfg.problem is Problem.KNAPSACK:
        return gen_knapsack(cfg, trial)
    return gen_assignment(cfg, trial)
