"""
BBShift Core package

This module contains the domain types and the black box shift estimators:
confusion-matrix and marginal estimation, the importance-weight solve with
its fallback threshold, singular-value diagnostics and the error bound.
Exceptions and the configuration loader used across the system live here too.
"""

from bbshift.core.estimation import (
    default_delta,
    error_bound,
    estimate_confusion,
    estimate_label_marginal,
    estimate_pred_marginal,
    estimate_weights,
    select_predictor,
    smallest_singular_value,
    solve_weights,
    validate_delta,
)
from bbshift.core.types import (
    ConfusionMatrix,
    LabelDistribution,
    LabelSpace,
    PredictionMode,
    Solver,
    SourceEval,
    TargetEval,
    WeightEstimate,
)

__all__ = [
    "ConfusionMatrix",
    "LabelDistribution",
    "LabelSpace",
    "PredictionMode",
    "Solver",
    "SourceEval",
    "TargetEval",
    "WeightEstimate",
    "default_delta",
    "error_bound",
    "estimate_confusion",
    "estimate_label_marginal",
    "estimate_pred_marginal",
    "estimate_weights",
    "select_predictor",
    "smallest_singular_value",
    "solve_weights",
    "validate_delta",
]
