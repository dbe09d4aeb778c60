"""Generators, the experiment runner, instance files and the CLI."""

from .experiment import ExperimentReport, TrialError, run_experiment, run_trial
from .generators import ExperimentConfig, Problem, gen_assignment, gen_knapsack, generate
from .io import parse_instance, serialize_instance

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "Problem",
    "TrialError",
    "gen_assignment",
    "gen_knapsack",
    "generate",
    "parse_instance",
    "run_experiment",
    "run_trial",
    "serialize_instance",
]
