"""Bound-quality experiment: Lagrangian grid bound versus the convex hull bound."""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..bounds import (
    BoundReport,
    Method,
    ch_bound_report,
    lagrangian_bound_report,
    lower_bound_valid,
    upper_bound_violations,
)
from ..exceptions import MoipError
from ..model import nondominated_set, supported_frontier
from ..relaxations import MultiplierGrid
from .generators import ExperimentConfig, Problem, generate

# Published means, sds and strong counts (out of 100) for context only;
# generator details differ, so these are not reproduction targets.
PUBLISHED_REFERENCE = {
    "assignment": {"lagrangian": (3.930, 0.587, 59), "ch": (4.801, 0.956, 9)},
    "knapsack": {"lagrangian": (5.869, 1.980, 3), "ch": (6.384, 1.803, 9)},
}


class TrialError(MoipError):
    def __init__(self, trial: int, seed: int, cause: BaseException):
        super().__init__(f"trial {trial} (seed {seed}) failed: {cause}")
        self.trial = trial
        self.seed = seed


@dataclass(frozen=True)
class TrialResult:
    trial: int
    instance: str
    n_nondominated: int
    reports: dict  # Method -> BoundReport
    upper_valid: dict  # Method -> bool
    lower_valid: bool
    wall_ms: dict = field(compare=False)  # Method -> float

    def as_dict(self) -> dict:
        return {
            "trial": self.trial,
            "instance": self.instance,
            "n_nondominated": self.n_nondominated,
            "lower_valid": self.lower_valid,
            "upper_valid": {m.value: v for m, v in self.upper_valid.items()},
            "reports": {m.value: r.as_dict() for m, r in self.reports.items()},
        }


@dataclass(frozen=True)
class MethodSummary:
    mean_d: float
    sd_d: float
    strong_count: int
    sd_by_convention: bool  # True when trials == 1 and sd is reported as 0

    def as_dict(self) -> dict:
        return {"mean_d": self.mean_d, "sd_d": self.sd_d, "strong_count": self.strong_count,
                "sd_by_convention": self.sd_by_convention}


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    summary: dict  # Method -> MethodSummary
    trials: tuple[TrialResult, ...]

    @property
    def all_valid(self) -> bool:
        return all(t.lower_valid and all(t.upper_valid.values()) for t in self.trials)

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "summary": {m.value: s.as_dict() for m, s in self.summary.items()},
            "all_valid": self.all_valid,
            "published_reference": PUBLISHED_REFERENCE[self.config.problem.value],
            "trials": [t.as_dict() for t in self.trials],
        }

    def to_json(self) -> str:
        """Deterministic JSON (timings excluded)."""
        return json.dumps(self.as_dict(), indent=1, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "method", "d", "gamma", "strong", "|U|", "|L|", "wall_ms"])
        for t in self.trials:
            for m in (Method.LAGRANGIAN, Method.CONVEX_HULL):
                r = t.reports[m]
                w.writerow([t.trial, m.value, repr(r.d), repr(r.gamma), int(r.strong), len(r.U),
                            len(r.L), f"{t.wall_ms[m]:.3f}"])
        return buf.getvalue()

    def summary_text(self) -> str:
        ref = PUBLISHED_REFERENCE[self.config.problem.value]
        lines = [f"problem={self.config.problem.value} trials={self.config.trials} "
                 f"seed={self.config.seed} grid={self.config.count}^2 rhs={self.config.rhs_rule}",
                 f"{'method':<11} {'mean d':>9} {'sd d':>9} {'#strong':>8}   published (mean, sd, #strong/100)"]
        for m in (Method.LAGRANGIAN, Method.CONVEX_HULL):
            s = self.summary[m]
            flag = " (sd: single trial)" if s.sd_by_convention else ""
            lines.append(f"{m.value:<11} {s.mean_d:9.4f} {s.sd_d:9.4f} {s.strong_count:>5}/{self.config.trials:<3}"
                         f"  {ref[m.value]}{flag}")
        lines.append(f"all bounds valid: {self.all_valid}")
        return "\n".join(lines) + "\n"

    def points_csv(self, trial_index: int = 0) -> str:
        """Point lists of one trial for plotting: set,y1,y2."""
        t = self.trials[trial_index]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["set", "y1", "y2"])
        for p in t.reports[Method.LAGRANGIAN].L:
            w.writerow(["L", *map(repr, p)])
        for m in (Method.LAGRANGIAN, Method.CONVEX_HULL):
            for p in t.reports[m].U.points:
                w.writerow([f"U_{m.value}", *map(repr, p)])
        return buf.getvalue()


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    try:
        inst = generate(cfg, trial)
        grid = MultiplierGrid.for_instance(inst, cfg.grid_max, cfg.count)
        t0 = time.perf_counter()
        front = supported_frontier(inst)
        nd = nondominated_set(inst)
        t1 = time.perf_counter()
        lag = lagrangian_bound_report(inst, grid, front)
        t2 = time.perf_counter()
        ch = ch_bound_report(inst, front)
        t3 = time.perf_counter()
        Y = inst.feasible_values
        reports = {Method.LAGRANGIAN: lag, Method.CONVEX_HULL: ch}
        upper = {m: upper_bound_violations(r.U, Y).shape[0] == 0 for m, r in reports.items()}
        shared = (t1 - t0) * 1e3
        return TrialResult(
            trial, inst.name, len(nd), reports, upper, lower_bound_valid(lag.L, nd),
            {Method.LAGRANGIAN: shared + (t2 - t1) * 1e3, Method.CONVEX_HULL: shared + (t3 - t2) * 1e3},
        )
    except MoipError as exc:
        raise TrialError(trial, cfg.seed, exc) from exc


def _run_one(args):
    return run_trial(*args)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    jobs = [(cfg, t) for t in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = tuple(pool.map(_run_one, jobs))
    else:
        trials = tuple(_run_one(j) for j in jobs)
    summary = {}
    for m in (Method.LAGRANGIAN, Method.CONVEX_HULL):
        ds = [t.reports[m].d for t in trials]
        single = len(ds) == 1
        summary[m] = MethodSummary(
            float(np.mean(ds)),
            0.0 if single else float(statistics.stdev(ds)),
            sum(t.reports[m].strong for t in trials),
            single,
        )
    return ExperimentReport(cfg, summary, trials)
