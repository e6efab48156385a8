"""
BBShift Black Box Shift Estimation

Moment estimators and the linear-solve machinery that recover importance
weights w(y) = q(y)/p(y) from a fixed classifier's outputs:

    Ĉ_{ŷ,y} · ŵ = μ̂_ŷ,        μ̂_y = diag(ν̂_y) · ŵ

plus the smallest-singular-value diagnostics (fallback threshold and model
selection) and the high-probability square-error bound.
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from bbshift.core.config_loader import config_loader
from bbshift.core.exceptions import (
    ConfigError,
    DimensionMismatchError,
    EmptyInputError,
    FormatError,
    InputDomainError,
)
from bbshift.core.types import (
    ConfusionMatrix,
    Evaluation,
    LabelDistribution,
    LabelSpace,
    PredictionMode,
    Solver,
    SourceEval,
    TargetEval,
    WeightEstimate,
)
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)

# Constant from the proof of the square-error bound
BOUND_CONSTANT = 80.0

# Relative cutoff below which singular values count as zero in the pseudo-inverse
PINV_RTOL = 1e-12


def default_delta(k: int) -> float:
    """Fallback threshold δ = delta_factor / k (delta_factor defaults to 0.1)."""
    factor = float(config_loader.get("estimation.delta_factor", 0.1))
    if not 0 < factor < 1:
        raise ConfigError(f"estimation.delta_factor must lie in (0, 1), got {factor}")
    return factor / k


def validate_delta(delta: float, k: int) -> float:
    """Check 0 < δ < 1/k and return δ as float."""
    delta = float(delta)
    if not 0 < delta < 1.0 / k:
        raise ConfigError(f"delta must satisfy 0 < delta < 1/k = {1.0 / k:.6g}, got {delta}")
    return delta


def _check_preds(preds: np.ndarray, space: LabelSpace) -> None:
    if preds.ndim == 1:
        space.check_labels(preds, "predicted label")
    elif preds.shape[1] != space.k:
        raise DimensionMismatchError(
            f"Probability vectors have length {preds.shape[1]}, label space has k={space.k}"
        )


def estimate_confusion(source: SourceEval, space: LabelSpace) -> ConfusionMatrix:
    """
    Estimate the joint confusion matrix Ĉ_{ŷ,y} from labeled source outputs.

    Hard mode counts (prediction, label) pairs; soft mode accumulates each
    example's predicted probability of class i into column y.

    Args:
        source: Predictions and true labels on source data
        space: Label space

    Returns:
        ConfusionMatrix with rows = predicted label, columns = true label
    """
    if source.n == 0:
        raise EmptyInputError("Cannot estimate a confusion matrix from zero examples")
    space.check_labels(source.labels)
    _check_preds(source.preds, space)

    k = space.k
    if source.mode is PredictionMode.HARD:
        counts = np.bincount(source.preds * k + source.labels, minlength=k * k)
        entries = counts.reshape(k, k).astype(np.float64) / source.n
    else:
        onehot = np.eye(k)[source.labels]
        entries = source.preds.T @ onehot / source.n

    logger.debug(f"Estimated {source.mode.value} confusion matrix from n={source.n}")
    return ConfusionMatrix(entries=entries, mode=source.mode, n=source.n)


def estimate_pred_marginal(evaluation: Evaluation, space: LabelSpace) -> LabelDistribution:
    """
    Estimate the predicted-label marginal μ̂_ŷ (or ν̂_ŷ on source data).

    Hard mode returns class frequencies of the predictions, soft mode the mean
    predicted probability per class.
    """
    preds = evaluation.preds
    if preds.shape[0] == 0:
        raise EmptyInputError("Cannot estimate a marginal from zero examples")
    _check_preds(preds, space)

    if preds.ndim == 1:
        return LabelDistribution.from_counts(np.bincount(preds, minlength=space.k))
    return LabelDistribution.normalized(preds.mean(axis=0))


def estimate_label_marginal(labels: Sequence[int], space: LabelSpace) -> LabelDistribution:
    """Empirical class frequencies ν̂_y of true labels."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise EmptyInputError("Cannot estimate a label marginal from zero labels")
    if not np.issubdtype(labels.dtype, np.integer):
        as_int = labels.astype(np.int64)
        if not np.array_equal(as_int, labels):
            raise InputDomainError("Labels must be integral class indices")
        labels = as_int
    space.check_labels(labels)
    return LabelDistribution.from_counts(np.bincount(labels, minlength=space.k))


def smallest_singular_value(confusion: Union[ConfusionMatrix, np.ndarray]) -> float:
    """σ_min of a square matrix via a full SVD."""
    entries = confusion.entries if isinstance(confusion, ConfusionMatrix) else np.asarray(confusion, dtype=np.float64)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {entries.shape}")
    return float(scipy.linalg.svdvals(entries).min())


def error_bound(n: int, m: int, k: int, sigma_min: float, w: Sequence[float]) -> float:
    """
    High-probability bound on ‖ŵ − w‖².

        80·log(n)/(σ_min²·n)·‖w‖² + 80·k·log(m)/(σ_min²·m)

    The constant comes from the proof of the bound and ‖w‖² is the plug-in
    estimate, so the value is a diagnostic, not a guarantee.
    """
    if n < 2 or m < 2:
        raise InputDomainError(f"Bound needs n, m >= 2, got n={n}, m={m}")
    if not sigma_min > 0:
        raise InputDomainError(f"Bound undefined for sigma_min={sigma_min}")
    norm_sq = float(np.dot(w, w))
    numerator = BOUND_CONSTANT * math.log(n) / n * norm_sq + BOUND_CONSTANT * k * math.log(m) / m
    return numerator / sigma_min ** 2


def solve_weights(
    confusion: ConfusionMatrix,
    mu_hat: LabelDistribution,
    nu_y: LabelDistribution,
    delta: Optional[float] = None,
    solver: Union[Solver, str] = Solver.LU,
    m: Optional[int] = None,
) -> WeightEstimate:
    """
    Solve Ĉ·w = μ̂_ŷ for the importance weights.

    When σ_min(Ĉ) ≤ δ the system is considered unreliable and the all-ones
    weights are returned with ``fallback`` set. Otherwise negative solution
    entries are clipped to zero.

    Args:
        confusion: Source confusion matrix Ĉ_{ŷ,y}
        mu_hat: Target predicted-label marginal μ̂_ŷ
        nu_y: Source label marginal ν̂_y
        delta: Fallback threshold, 0 < δ < 1/k (default 1/(10k))
        solver: ``lu`` or ``pseudoinverse``
        m: Target sample size; enables the error bound when given

    Returns:
        WeightEstimate
    """
    k = confusion.k
    if mu_hat.k != k or nu_y.k != k:
        raise DimensionMismatchError(
            f"Confusion matrix has k={k}, mu_hat k={mu_hat.k}, nu_y k={nu_y.k}"
        )
    delta = validate_delta(default_delta(k) if delta is None else delta, k)
    solver = Solver(solver)

    sigma = smallest_singular_value(confusion)
    if sigma <= delta:
        logger.warning(f"sigma_min={sigma:.3g} <= delta={delta:.3g}; falling back to w = 1")
        ones = np.ones(k)
        return WeightEstimate(
            w=ones,
            w_raw=ones,
            sigma_min=sigma,
            fallback=True,
            clipped=np.zeros(k, dtype=bool),
            mu_y=nu_y.probs.copy(),
            bound=None,
        )

    if solver is Solver.LU:
        w_raw = scipy.linalg.lu_solve(scipy.linalg.lu_factor(confusion.entries), mu_hat.probs)
    else:
        w_raw = scipy.linalg.pinv(confusion.entries, atol=0.0, rtol=PINV_RTOL) @ mu_hat.probs

    clipped = w_raw < 0
    w = np.maximum(w_raw, 0.0)
    if clipped.any():
        logger.warning(f"Clipped negative weights for classes {np.flatnonzero(clipped).tolist()}")

    bound = None
    if m is not None and confusion.n >= 2 and m >= 2:
        bound = error_bound(confusion.n, m, k, sigma, w)

    logger.debug(f"Solved weights with {solver.value}: sigma_min={sigma:.4g}, w={np.round(w, 4).tolist()}")
    return WeightEstimate(
        w=w,
        w_raw=w_raw,
        sigma_min=sigma,
        fallback=False,
        clipped=clipped,
        mu_y=nu_y.probs * w,
        bound=bound,
    )


def estimate_weights(
    source: SourceEval,
    target: TargetEval,
    space: LabelSpace,
    delta: Optional[float] = None,
    solver: Union[Solver, str] = Solver.LU,
) -> Tuple[WeightEstimate, ConfusionMatrix, LabelDistribution]:
    """
    Run the full estimation chain on classifier outputs.

    Returns:
        The weight estimate, the source confusion matrix and μ̂_ŷ
    """
    if source.mode is not target.mode:
        raise FormatError(
            f"Source predictions are {source.mode.value} but target predictions are {target.mode.value}"
        )
    confusion = estimate_confusion(source, space)
    mu_hat = estimate_pred_marginal(target, space)
    nu_y = estimate_label_marginal(source.labels, space)
    estimate = solve_weights(confusion, mu_hat, nu_y, delta=delta, solver=solver, m=target.m)
    return estimate, confusion, mu_hat


def select_predictor(confusions: Sequence[ConfusionMatrix]) -> Tuple[int, List[float]]:
    """
    Pick the candidate classifier whose confusion matrix has the largest σ_min.

    Args:
        confusions: One confusion matrix per candidate, estimated on the same hold-out data

    Returns:
        Index of the best candidate (lowest index on ties) and every candidate's σ_min
    """
    if not confusions:
        raise EmptyInputError("No candidate predictors given")
    sigmas = [smallest_singular_value(c) for c in confusions]
    best = int(np.argmax(sigmas))
    logger.info(f"Selected predictor {best} with sigma_min={sigmas[best]:.4g}")
    return best, sigmas
