"""
Shared fixtures: the three diagonal examples and a clean config singleton.
"""

import numpy as np
import pytest

from spherebranch.config import reset_config
from spherebranch.core.operators import example_problem


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    for name in ("SPHEREBRANCH_CONFIG", "SPHEREBRANCH_LOG", "SPHEREBRANCH_THREADS", "SPHEREBRANCH_OUT"):
        monkeypatch.delenv(name, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture(scope="session")
def k1():
    return example_problem(1, 16)


@pytest.fixture(scope="session")
def k2():
    return example_problem(2, 16)


@pytest.fixture(scope="session")
def k3():
    return example_problem(3, 16)


def unit(n: int, index: int) -> np.ndarray:
    """Standard basis vector e_index (1-based)."""
    e = np.zeros(n)
    e[index - 1] = 1.0
    return e
