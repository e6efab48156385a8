"""
BBShift Synthetic Data

Gaussian class-conditional mixtures for desk-scale experiments. The
class-conditionals are fixed, so any two samples drawn with different label
marginals differ only by label shift.
"""

import math

import numpy as np

from bbshift.core.exceptions import DimensionMismatchError, InputDomainError
from bbshift.core.types import LabelDistribution, LabelSpace
from bbshift.model.dataset import Dataset
from bbshift.simulation.rng import SeededRng


def separated_means(k: int, separation: float, scale: float = 1.0) -> np.ndarray:
    """k×k class means, every pair ``separation · scale`` apart (scaled unit vectors)."""
    if separation < 0 or scale <= 0:
        raise InputDomainError(f"Need separation >= 0 and scale > 0, got {separation}, {scale}")
    return np.eye(k) * (separation * scale / math.sqrt(2.0))


def gen_gaussian_mixture(
    space: LabelSpace,
    dim: int,
    means: np.ndarray,
    scale: float,
    q: LabelDistribution,
    n: int,
    rng: SeededRng,
) -> Dataset:
    """
    Draw n labeled examples: y ~ q, x | y ~ Normal(means[y], scale²·I).

    Args:
        space: Label space
        dim: Feature dimension d
        means: k×d matrix of class means
        scale: Per-coordinate standard deviation
        q: Label marginal
        n: Number of examples (0 gives an empty dataset)
        rng: Random stream (consumed by value)

    Returns:
        Dataset
    """
    means = np.asarray(means, dtype=np.float64)
    if means.shape != (space.k, dim):
        raise DimensionMismatchError(f"Means must be {space.k}×{dim}, got {means.shape}")
    if not np.all(np.isfinite(means)):
        raise InputDomainError("Class means must be finite")
    if not scale > 0:
        raise InputDomainError(f"Scale must be positive, got {scale}")
    if q.k != space.k:
        raise DimensionMismatchError(f"q has k={q.k}, label space has k={space.k}")
    if n < 0:
        raise InputDomainError(f"Sample size must be nonnegative, got {n}")
    if n == 0:
        return Dataset.empty(space, dim)

    gen = rng.generator()
    labels = gen.choice(space.k, size=n, p=q.probs)
    features = means[labels] + scale * gen.standard_normal((n, dim))
    return Dataset(features, labels, space)
