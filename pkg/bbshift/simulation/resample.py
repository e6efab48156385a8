"""
BBShift Label-Conditional Resampling

Draws a dataset with a prescribed label marginal from a labeled pool while
leaving every class-conditional feature distribution untouched: first a
class is sampled from q, then an example uniformly with replacement from that
class's pool. Every output row is therefore a copy of an input row of the
same class.
"""

import numpy as np

from bbshift.core.exceptions import DimensionMismatchError, InputDomainError, SupportError
from bbshift.core.types import LabelDistribution
from bbshift.model.dataset import Dataset
from bbshift.simulation.rng import SeededRng
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)


def resample_by_label(data: Dataset, q: LabelDistribution, size: int, rng: SeededRng) -> Dataset:
    """
    Sample ``size`` examples whose labels follow q.

    Args:
        data: Labeled pool
        q: Desired label marginal
        size: Number of examples to draw
        rng: Random stream (consumed by value)

    Returns:
        Resampled dataset

    Raises:
        SupportError: q puts mass on a class with no examples in the pool
    """
    if q.k != data.space.k:
        raise DimensionMismatchError(f"q has k={q.k}, dataset has k={data.space.k}")
    if size < 0:
        raise InputDomainError(f"Sample size must be nonnegative, got {size}")

    counts = data.class_counts()
    empty = np.flatnonzero((q.probs > 0) & (counts == 0))
    if empty.size:
        raise SupportError(f"q puts mass on classes with no examples: {empty.tolist()}")
    if size == 0:
        return Dataset.empty(data.space, data.d)

    gen = rng.generator()
    labels = gen.choice(data.space.k, size=size, p=q.probs)
    picks = np.empty(size, dtype=np.int64)
    for c in range(data.space.k):
        positions = np.flatnonzero(labels == c)
        if positions.size == 0:
            continue
        pool = np.flatnonzero(data.labels == c)
        picks[positions] = pool[gen.integers(0, pool.size, size=positions.size)]

    logger.debug(f"Resampled {size} examples from a pool of {data.n}")
    return data.subset(picks)
