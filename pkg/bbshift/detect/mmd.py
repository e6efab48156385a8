"""
BBShift Label-Shift Assumption Check

Compares the importance-weighted source sample with the target sample in an
RBF-kernel feature space:

    ‖(1/n) Σ_i w(y_i) k(φ(x_i), ·) − (1/m) Σ_j k(φ(x′_j), ·)‖²_H

If the weights are right and only p(y) changed, the statistic is of the order
of the sampling error; a large value means the class-conditionals moved too.
The null distribution is bootstrapped by drawing a pseudo-source uniformly
from the source and a pseudo-target from the source with probability
proportional to the weights, each replication on its own random substream.

The observed statistic uses the weights as given. Only the bootstrap
replications rescale them to ω·n/Σω, so the weighted pseudo-source carries
the same total mass as the pseudo-target.
"""

from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from bbshift.core.config_loader import config_loader
from bbshift.core.exceptions import (
    DegenerateKernelError,
    DimensionMismatchError,
    EmptyInputError,
    InputDomainError,
)
from bbshift.detect.detector import DetectionMethod, ShiftReport
from bbshift.simulation.rng import SeededRng
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)

MIN_BOOTSTRAP_REPS = 100


def _as_scores(scores: Sequence, what: str) -> np.ndarray:
    array = np.asarray(scores, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[0] == 0:
        raise EmptyInputError(f"{what} scores must be a nonempty n×r matrix")
    if not np.all(np.isfinite(array)):
        raise InputDomainError(f"{what} scores must be finite")
    return array


def _weighted_mmd2(k_ss: np.ndarray, k_st: np.ndarray, k_tt: np.ndarray, omega: np.ndarray) -> float:
    n, m = k_st.shape
    value = omega @ k_ss @ omega / n ** 2 - 2.0 * omega @ k_st.sum(axis=1) / (n * m) + k_tt.sum() / m ** 2
    return float(max(value, 0.0))


def rbf_gram(points: np.ndarray) -> tuple:
    """Gram matrix of the pooled points and the median-distance bandwidth."""
    distances = pdist(points)
    bandwidth = float(np.median(distances)) if distances.size else 0.0
    if bandwidth <= 0.0:
        raise DegenerateKernelError("Median pairwise distance is zero; all scores are identical")
    gram = np.exp(-squareform(distances) ** 2 / (2.0 * bandwidth ** 2))
    return gram, bandwidth


def assumption_check_mmd(
    source_scores: Sequence,
    source_labels: Sequence[int],
    w: Sequence[float],
    target_scores: Sequence,
    bootstrap_reps: Optional[int] = None,
    rng: Optional[SeededRng] = None,
    alpha: float = 0.05,
) -> ShiftReport:
    """
    Weighted-MMD test of whether label shift explains the source/target difference.

    Args:
        source_scores: Per-example feature vectors φ(x_i) on source data
        source_labels: True source labels
        w: Class importance weights (nonnegative)
        target_scores: Per-example feature vectors φ(x′_j) on target data
        bootstrap_reps: Number of null replications (>= 100, default ``detection.bootstrap_reps``)
        rng: Random stream; replication b uses ``rng.substream(b)``
        alpha: Significance level

    Returns:
        ShiftReport with method ``mmd``; ``details`` holds the bandwidth
    """
    source = _as_scores(source_scores, "Source")
    target = _as_scores(target_scores, "Target")
    if source.shape[1] != target.shape[1]:
        raise DimensionMismatchError(f"Score widths differ: {source.shape[1]} vs {target.shape[1]}")

    labels = np.asarray(source_labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != source.shape[0]:
        raise DimensionMismatchError(f"{labels.shape[0]} labels for {source.shape[0]} source scores")
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InputDomainError("Importance weights must be finite and nonnegative")
    if labels.min() < 0 or labels.max() >= w.size:
        raise InputDomainError(f"Source labels must lie in 0..{w.size - 1}")
    omega = w[labels]
    if omega.sum() <= 0:
        raise InputDomainError("Importance weights put zero mass on every source example")

    reps = int(config_loader.get("detection.bootstrap_reps", 200) if bootstrap_reps is None else bootstrap_reps)
    if reps < MIN_BOOTSTRAP_REPS:
        raise InputDomainError(f"Need at least {MIN_BOOTSTRAP_REPS} bootstrap replications, got {reps}")
    rng = rng or SeededRng(0)

    n, m = source.shape[0], target.shape[0]
    gram, bandwidth = rbf_gram(np.vstack([source, target]))
    k_ss = gram[:n, :n]
    # Observed statistic on the raw weights
    statistic = _weighted_mmd2(k_ss, gram[:n, n:], gram[n:, n:], omega)

    # Bootstrap world: the resampling target is the normalized weighted source
    omega_star = omega * (n / omega.sum())
    probs = omega / omega.sum()
    exceed = 0
    for b in range(reps):
        gen = rng.substream(b).generator()
        idx_s = gen.integers(0, n, size=n)
        idx_t = gen.choice(n, size=m, p=probs)
        null_stat = _weighted_mmd2(
            k_ss[np.ix_(idx_s, idx_s)],
            k_ss[np.ix_(idx_s, idx_t)],
            k_ss[np.ix_(idx_t, idx_t)],
            omega_star[idx_s],
        )
        exceed += null_stat >= statistic

    p_value = (1.0 + exceed) / (1.0 + reps)
    logger.debug(f"Weighted MMD^2={statistic:.4g}, bandwidth={bandwidth:.4g}, p={p_value:.4g}")
    return ShiftReport.decide(
        DetectionMethod.MMD, statistic, p_value, alpha, (n, m),
        bandwidth=bandwidth, bootstrap_reps=reps,
    )
