"""
BBShift Black Box Shift Correction

Domain adaptation via label shift:

1. randomly split the labeled training data into two halves
2. train the black box f on the first half
3. estimate the confusion matrix on the second half and μ̂_ŷ on the target,
   solve for the importance weights (falling back to w = 1 when σ_min ≤ δ)
4. retrain by importance-weighted ERM with the clipped weights

Step 4 uses the full training set by default; ``retrain_on="split"`` trains
on the first half only. ``detect_first`` runs BBSD beforehand and skips the
reweighting when no shift is detected, and ``reuse_split`` trains f and
estimates Ĉ on the same data instead of splitting.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from bbshift.core.config_loader import config_loader
from bbshift.core.estimation import default_delta, estimate_weights, validate_delta
from bbshift.core.exceptions import ConfigError, EmptyInputError, SupportError
from bbshift.core.types import ConfusionMatrix, PredictionMode, Solver, SourceEval, TargetEval, WeightEstimate
from bbshift.detect.detector import DetectionMethod, ShiftReport, detect_label_shift
from bbshift.model.dataset import Dataset
from bbshift.model.softmax import SoftmaxModel, TrainConfig, accuracy, predict, train_softmax
from bbshift.simulation.rng import SeededRng
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)


class RetrainOn(str, Enum):
    """Training data used for the weighted ERM step."""

    SPLIT = "split"
    FULL = "full"


class CorrectionConfig(BaseModel):
    """
    Settings for one correction run.

    ``delta=None`` means 1/(10k); the upper limit 1/k is checked once k is
    known.
    """

    model_config = ConfigDict(frozen=True)

    delta: Optional[float] = Field(default=None, gt=0.0)
    train_cfg: TrainConfig = Field(default_factory=TrainConfig)
    split_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)
    retrain_on: RetrainOn = RetrainOn.FULL
    seed: int = Field(default=0, ge=0)
    mode: PredictionMode = PredictionMode.HARD
    solver: Solver = Solver.LU
    detect_first: bool = False
    detection_alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    detection_method: DetectionMethod = DetectionMethod.CHI2
    reuse_split: bool = False

    @classmethod
    def from_config(cls, **overrides: Any) -> "CorrectionConfig":
        """
        Build a config from ``system_config.yaml`` defaults plus explicit overrides.

        Raises:
            ConfigError: A value violates its constraint
        """
        values: Dict[str, Any] = {
            "train_cfg": TrainConfig(
                learning_rate=config_loader.get("training.learning_rate", 0.5),
                iterations=config_loader.get("training.iterations", 300),
                l2=config_loader.get("training.l2", 0.0),
            ),
            "split_fraction": config_loader.get("correction.split_fraction", 0.5),
            "retrain_on": config_loader.get("correction.retrain_on", "full"),
            "mode": config_loader.get("estimation.mode", "hard"),
            "solver": config_loader.get("estimation.solver", "lu"),
            "detect_first": config_loader.get("correction.detect_first", False),
            "detection_alpha": config_loader.get("detection.alpha", 0.05),
            "detection_method": config_loader.get("detection.method", "chi2"),
            "reuse_split": config_loader.get("correction.reuse_split", False),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid correction settings: {e}") from e


@dataclass(frozen=True)
class CorrectionResult:
    """Output of bbsc_correct."""

    model: SoftmaxModel
    baseline: SoftmaxModel
    weights: WeightEstimate
    confusion: ConfusionMatrix
    detection: Optional[ShiftReport] = None
    reweighted: bool = True
    target_accuracy: Optional[float] = None
    baseline_accuracy: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weights": self.weights.to_dict(),
            "detection": self.detection.model_dump(mode="json") if self.detection else None,
            "reweighted": self.reweighted,
            "target_accuracy": self.target_accuracy,
            "baseline_accuracy": self.baseline_accuracy,
        }


def split_train(data: Dataset, fraction: float, rng: SeededRng) -> Tuple[np.ndarray, np.ndarray]:
    """
    Random partition of example indices into two disjoint halves.

    Args:
        data: Training data
        fraction: Share of examples in the first half, 0 < fraction < 1
        rng: Random stream

    Returns:
        (first indices, second indices), each sorted

    Raises:
        SupportError: Some class is missing from one of the halves
    """
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"split_fraction must lie in (0, 1), got {fraction}")
    if data.n < 2:
        raise EmptyInputError(f"Cannot split {data.n} training examples")

    order = rng.generator().permutation(data.n)
    cut = min(max(int(round(fraction * data.n)), 1), data.n - 1)
    first, second = np.sort(order[:cut]), np.sort(order[cut:])

    for name, idx in (("first", first), ("second", second)):
        counts = np.bincount(data.labels[idx], minlength=data.space.k)
        missing = np.flatnonzero(counts == 0)
        if missing.size:
            raise SupportError(f"Classes {missing.tolist()} missing from the {name} half of the split")
    return first, second


def fit_black_box(data: Dataset, cfg: Optional[TrainConfig] = None) -> SoftmaxModel:
    """Unweighted ERM: the black box f of the estimation step."""
    return train_softmax(data, None, cfg)


def bbsc_correct(
    train: Dataset,
    target_features: np.ndarray,
    cfg: Optional[CorrectionConfig] = None,
    evaluation: Optional[Dataset] = None,
) -> CorrectionResult:
    """
    Correct a classifier for label shift between train and an unlabeled target.

    Args:
        train: Labeled source data
        target_features: Unlabeled target feature matrix
        cfg: Correction settings
        evaluation: Labeled target sample used only to report accuracies

    Returns:
        CorrectionResult
    """
    cfg = cfg or CorrectionConfig()
    space = train.space
    delta = validate_delta(default_delta(space.k) if cfg.delta is None else cfg.delta, space.k)

    target_features = np.asarray(target_features, dtype=np.float64)
    if target_features.ndim == 1:
        target_features = target_features.reshape(-1, 1)
    if target_features.shape[0] == 0:
        raise EmptyInputError("Target sample is empty")
    if train.n == 0:
        raise EmptyInputError("Training data is empty")

    rng = SeededRng(cfg.seed)
    if cfg.reuse_split:
        missing = np.flatnonzero(train.class_counts() == 0)
        if missing.size:
            raise SupportError(f"Classes {missing.tolist()} have no training examples")
        first_idx = second_idx = np.arange(train.n)
    else:
        first_idx, second_idx = split_train(train, cfg.split_fraction, rng.substream(0))
    first, second = train.subset(first_idx), train.subset(second_idx)

    black_box = fit_black_box(first, cfg.train_cfg)
    source_eval = SourceEval(predict(black_box, second.features, cfg.mode), second.labels)
    target_eval = TargetEval(predict(black_box, target_features, cfg.mode))

    detection = None
    reweight = True
    if cfg.detect_first:
        detection = detect_label_shift(
            source_eval, target_eval, alpha=cfg.detection_alpha, method=cfg.detection_method, space=space
        )
        reweight = detection.reject
        if not reweight:
            logger.info(f"No shift detected (p={detection.p_value:.4g}); keeping the unweighted model")

    estimate, confusion, _ = estimate_weights(source_eval, target_eval, space, delta=delta, solver=cfg.solver)

    retrain = train if cfg.retrain_on is RetrainOn.FULL else first
    if cfg.retrain_on is RetrainOn.SPLIT:
        baseline = black_box
    else:
        baseline = train_softmax(retrain, None, cfg.train_cfg)

    if reweight and not estimate.fallback:
        corrected = train_softmax(retrain, estimate.example_weights(retrain.labels), cfg.train_cfg)
    else:
        corrected = baseline
    reweighted = reweight and not estimate.fallback

    target_accuracy = baseline_accuracy = None
    if evaluation is not None:
        target_accuracy = accuracy(corrected, evaluation)
        baseline_accuracy = accuracy(baseline, evaluation)
        logger.debug(f"Target accuracy: baseline={baseline_accuracy:.4f}, corrected={target_accuracy:.4f}")

    logger.info(
        f"BBSC finished: w={np.round(estimate.w, 4).tolist()}, fallback={estimate.fallback}, reweighted={reweighted}"
    )
    return CorrectionResult(
        model=corrected,
        baseline=baseline,
        weights=estimate,
        confusion=confusion,
        detection=detection,
        reweighted=reweighted,
        target_accuracy=target_accuracy,
        baseline_accuracy=baseline_accuracy,
    )
