"""
Pytest configuration file for tests.

This file is automatically loaded by pytest before running tests.
It adds the project root directory to the Python path, allowing
imports of 'bbshift' modules to work correctly, and defines the
fixtures shared by the unit and integration suites.
"""

import sys
from pathlib import Path

import numpy as np
import pytest


def pytest_configure(config):
    """
    Configure pytest environment.

    Adds the project root directory to sys.path and registers markers.
    """
    project_root = Path(__file__).parent.parent.parent

    if str(project_root) not in sys.path:
        sys.path.insert(0, str(project_root))

    config.addinivalue_line("markers", "slow: Monte-Carlo acceptance runs (seconds to minutes)")


@pytest.fixture()
def space2():
    from bbshift.core import LabelSpace
    return LabelSpace(2)


@pytest.fixture()
def space3():
    from bbshift.core import LabelSpace
    return LabelSpace(3)


@pytest.fixture()
def train_cfg():
    """Training settings that fit the bundled mixtures to convergence."""
    from bbshift.model import TrainConfig
    return TrainConfig(learning_rate=0.5, iterations=300, l2=0.0, seed=0)


@pytest.fixture()
def mixture3():
    """
    Factory for 3-class Gaussian mixture datasets.

    Returns a callable ``make(q, n, seed, separation=6.0)`` producing a Dataset
    whose class means are ``separation`` standard deviations apart.
    """
    from bbshift.core import LabelDistribution, LabelSpace
    from bbshift.model import gen_gaussian_mixture, separated_means
    from bbshift.simulation import SeededRng

    space = LabelSpace(3)

    def make(q, n, seed, separation=6.0):
        if not isinstance(q, LabelDistribution):
            q = LabelDistribution(np.asarray(q, dtype=float))
        means = separated_means(space.k, separation=separation, scale=1.0)
        return gen_gaussian_mixture(space, space.k, means, 1.0, q, n, SeededRng(seed))

    return make
