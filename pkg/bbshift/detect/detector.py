"""
BBShift Black Box Shift Detection

Tests H₀: q(y) = p(y) by comparing the distribution of a fixed classifier's
predicted labels on source and target samples. Under label shift with an
invertible confusion matrix, q(y) = p(y) if and only if q(ŷ) = p(ŷ); without
the label-shift assumption a rejection still signals that the data changed.
"""

from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from bbshift.core.config_loader import config_loader
from bbshift.core.exceptions import ConfigError, EmptyInputError
from bbshift.core.types import LabelSpace, SourceEval, TargetEval
from bbshift.detect.two_sample import chi2_two_sample, ks_two_sample
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)


class DetectionMethod(str, Enum):
    """Two-sample test used for a decision."""

    KS = "ks"
    CHI2 = "chi2"
    MMD = "mmd"


class ShiftReport(BaseModel):
    """Outcome of a shift test at significance level alpha."""

    model_config = ConfigDict(frozen=True)

    method: DetectionMethod
    statistic: float = Field(ge=0.0)
    p_value: float = Field(ge=0.0, le=1.0)
    alpha: float = Field(gt=0.0, lt=1.0)
    reject: bool
    sample_sizes: Tuple[int, int]
    details: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_decision(self) -> "ShiftReport":
        if self.reject != (self.p_value < self.alpha):
            raise ValueError("reject must equal (p_value < alpha)")
        return self

    @classmethod
    def decide(
        cls,
        method: Union[DetectionMethod, str],
        statistic: float,
        p_value: float,
        alpha: float,
        sample_sizes: Tuple[int, int],
        **details: Any,
    ) -> "ShiftReport":
        return cls(
            method=DetectionMethod(method),
            statistic=statistic,
            p_value=p_value,
            alpha=alpha,
            reject=p_value < alpha,
            sample_sizes=sample_sizes,
            details=details,
        )


Predictions = Union[SourceEval, TargetEval, Sequence[int], Sequence[Sequence[float]], np.ndarray]


def reduce_to_hard(preds: Predictions) -> np.ndarray:
    """
    Predicted class indices; probability vectors are reduced by argmax with
    ties going to the lowest class index.
    """
    if isinstance(preds, (SourceEval, TargetEval)):
        array = preds.preds
    else:
        array = TargetEval(preds).preds
    if array.ndim == 2:
        return np.argmax(array, axis=1).astype(np.int64)
    return np.asarray(array, dtype=np.int64)


def _width(preds: Predictions) -> Optional[int]:
    array = preds.preds if isinstance(preds, (SourceEval, TargetEval)) else np.asarray(preds)
    return int(array.shape[1]) if array.ndim == 2 else None


def detect_label_shift(
    source: Predictions,
    target: Predictions,
    alpha: Optional[float] = None,
    method: Union[DetectionMethod, str, None] = None,
    space: Optional[LabelSpace] = None,
) -> ShiftReport:
    """
    Black box shift detection on predicted labels.

    Args:
        source: Source predictions (an eval object or a raw prediction sequence)
        target: Target predictions
        alpha: Significance level (default ``detection.alpha``)
        method: ``chi2`` on per-class counts or ``ks`` on the class indices as reals
            (default ``detection.method``)
        space: Label space; inferred from the predictions when omitted

    Returns:
        ShiftReport
    """
    alpha = float(config_loader.get("detection.alpha", 0.05) if alpha is None else alpha)
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    method = DetectionMethod(method or config_loader.get("detection.method", "chi2"))
    if method is DetectionMethod.MMD:
        raise ConfigError("Use assumption_check_mmd for the MMD test")

    src = reduce_to_hard(source)
    tgt = reduce_to_hard(target)
    if src.size == 0 or tgt.size == 0:
        raise EmptyInputError("Detection needs nonempty source and target predictions")

    if space is None:
        widths = [w for w in (_width(source), _width(target)) if w is not None]
        k = max(widths + [int(src.max()) + 1, int(tgt.max()) + 1, 2])
        space = LabelSpace(k)
    space.check_labels(src, "source prediction")
    space.check_labels(tgt, "target prediction")

    if method is DetectionMethod.KS:
        statistic, p_value = ks_two_sample(src.astype(np.float64), tgt.astype(np.float64))
    else:
        statistic, p_value = chi2_two_sample(
            np.bincount(src, minlength=space.k), np.bincount(tgt, minlength=space.k)
        )

    report = ShiftReport.decide(method, statistic, p_value, alpha, (int(src.size), int(tgt.size)))
    logger.debug(f"BBSD {method.value}: statistic={statistic:.4g}, p={p_value:.4g}, reject={report.reject}")
    return report
