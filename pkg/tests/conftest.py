import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from moipdual import MoipInstance

sys.path.insert(0, os.path.dirname(__file__))

# instance fixtures are immutable, so sharing them across generated inputs is safe
settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture]
)
settings.load_profile("default")

HALF = 0.5


def cut_square() -> MoipInstance:
    return MoipInstance.build([[1, -HALF], [-HALF, 1]], [([1, 1], 1.5)], upper=[1, 1], dualized=[0])


def binary_pair() -> MoipInstance:
    return MoipInstance.build([[1, -HALF], [-HALF, 1]], [([1, 1], 1)], upper=[1, 1], dualized=[0])


def integer_pair() -> MoipInstance:
    return MoipInstance.build([[1, -HALF], [-HALF, 1]], [([1, 1], 1)])


def small_knapsack() -> MoipInstance:
    return MoipInstance.build([[2, 1], [1, 2]], [([1, 1], 2)])


def two_row() -> MoipInstance:
    return MoipInstance.build([[1, 0], [0, 1]], [([2, 4], 5), ([4, 2], 5)], upper=[1, 1], dualized=[0, 1])


@pytest.fixture
def cut():
    return cut_square()


@pytest.fixture
def pair():
    return binary_pair()


@pytest.fixture
def ipair():
    return integer_pair()


@pytest.fixture
def knap():
    return small_knapsack()


@pytest.fixture
def tworow():
    return two_row()


def random_instance(rng: np.random.Generator, n_max: int = 5, k: int = 2) -> MoipInstance:
    """Small boxed instance; x = 0 is always feasible, at least one row is dualized."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, 4))
    C = rng.integers(-5, 6, size=(k, n))
    A = rng.integers(-2, 5, size=(m, n))
    b = rng.integers(0, 6, size=m)
    upper = rng.integers(1, 3, size=n)
    m1 = int(rng.integers(1, m + 1))
    dual = tuple(sorted(rng.choice(m, size=m1, replace=False).tolist()))
    return MoipInstance(C, A, b, np.zeros(n), upper, dual)


def random_nonneg_instance(rng: np.random.Generator, n_max: int = 3, k: int = 2) -> MoipInstance:
    """Nonnegative integer rows with every column bounded by some row; boxes implied."""
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, 3))
    A = rng.integers(0, 3, size=(m, n))
    for j in range(n):
        if not A[:, j].any():
            A[rng.integers(0, m), j] = int(rng.integers(1, 3))
    b = rng.integers(0, 4, size=m)
    C = rng.integers(-3, 7, size=(k, n))
    return MoipInstance(C, A, b, np.zeros(n), np.full(n, np.inf), ())
