"""
BBShift Two-Sample Tests

Kolmogorov–Smirnov and chi-square homogeneity tests on one-dimensional
classifier outputs.
"""

import math
from typing import Sequence, Tuple

import numpy as np
from scipy.special import gammaincc, kolmogorov

from bbshift.core.exceptions import DimensionMismatchError, EmptyInputError, InputDomainError


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> Tuple[float, float]:
    """
    Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.

    D is the largest gap between the two empirical CDFs over the pooled
    points; the p-value is the Kolmogorov survival function

        2 · Σ_{j≥1} (−1)^(j−1) · exp(−2 j² λ²),   λ = D · √(n₁n₂/(n₁+n₂)).

    Ties (as with discrete predicted labels) make this p-value conservative.

    Returns:
        (D, p_value)
    """
    a = np.sort(np.asarray(a, dtype=np.float64).reshape(-1))
    b = np.sort(np.asarray(b, dtype=np.float64).reshape(-1))
    if a.size == 0 or b.size == 0:
        raise EmptyInputError("Both samples of a KS test must be nonempty")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InputDomainError("KS samples must be finite")

    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    statistic = float(np.max(np.abs(cdf_a - cdf_b)))

    lam = statistic * math.sqrt(a.size * b.size / (a.size + b.size))
    p_value = float(min(max(kolmogorov(lam), 0.0), 1.0))
    return statistic, p_value


def chi2_two_sample(counts_a: Sequence[int], counts_b: Sequence[int]) -> Tuple[float, float]:
    """
    Chi-square test of homogeneity for two count vectors over the same categories.

    Categories empty in both samples are dropped, leaving k′ categories and
    k′ − 1 degrees of freedom. The p-value is the regularized upper incomplete
    gamma function Q(df/2, statistic/2).

    Returns:
        (statistic, p_value)
    """
    counts_a = np.asarray(counts_a, dtype=np.float64).reshape(-1)
    counts_b = np.asarray(counts_b, dtype=np.float64).reshape(-1)
    if counts_a.shape != counts_b.shape:
        raise DimensionMismatchError(f"Count vectors differ in length: {counts_a.size} vs {counts_b.size}")
    if np.any(counts_a < 0) or np.any(counts_b < 0) or not (np.all(np.isfinite(counts_a)) and np.all(np.isfinite(counts_b))):
        raise InputDomainError("Counts must be finite and nonnegative")
    if counts_a.sum() < 1 or counts_b.sum() < 1:
        raise EmptyInputError("Both samples of a chi-square test need at least one count")

    keep = (counts_a + counts_b) > 0
    table = np.vstack([counts_a[keep], counts_b[keep]])
    df = table.shape[1] - 1
    if df == 0:
        return 0.0, 1.0

    expected = table.sum(axis=1, keepdims=True) * table.sum(axis=0, keepdims=True) / table.sum()
    statistic = float(max(np.sum((table - expected) ** 2 / expected), 0.0))
    p_value = float(min(max(gammaincc(df / 2.0, statistic / 2.0), 0.0), 1.0))
    return statistic, p_value
