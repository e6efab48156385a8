"""
BBShift Softmax Regression

A multinomial logistic regression classifier used as the bundled black box.
Training minimizes the importance-weighted cross-entropy

    (1/n) Σ_i w_i · CE(softmax(W x_i + b), y_i) + (l2/2) · ‖W‖²_F

by full-batch gradient descent from zero parameters for a fixed number of
steps, so a given (data, weights, config) always yields the same model. The
bias is not penalized.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import log_softmax, softmax

from bbshift.core.exceptions import (
    DegenerateObjectiveError,
    DimensionMismatchError,
    EmptyInputError,
    InputDomainError,
)
from bbshift.core.types import LabelSpace, PredictionMode
from bbshift.model.dataset import Dataset
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)


class TrainConfig(BaseModel):
    """
    Gradient-descent settings.

    ``seed`` is carried for provenance; zero initialization and full-batch
    steps make training itself deterministic.
    """

    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default=0.5, gt=0.0)
    iterations: int = Field(default=300, ge=0)
    l2: float = Field(default=0.0, ge=0.0)
    seed: int = Field(default=0, ge=0)


@dataclass(frozen=True)
class SoftmaxModel:
    """Parameters of a trained classifier: weights (k×d) and bias (k)."""

    weights: np.ndarray
    bias: np.ndarray
    space: LabelSpace

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        bias = np.array(self.bias, dtype=np.float64).reshape(-1)
        if weights.ndim != 2 or weights.shape[0] != self.space.k or bias.shape[0] != self.space.k:
            raise DimensionMismatchError(
                f"Expected weights k×d and bias k with k={self.space.k}, "
                f"got {weights.shape} and {bias.shape}"
            )
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise InputDomainError("Model parameters must be finite")
        weights.flags.writeable = False
        bias.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def d(self) -> int:
        return int(self.weights.shape[1])

    @classmethod
    def zeros(cls, space: LabelSpace, d: int) -> "SoftmaxModel":
        return cls(np.zeros((space.k, d)), np.zeros(space.k), space)

    def logits(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(1, -1)
        if features.shape[1] != self.d:
            raise DimensionMismatchError(f"Model expects {self.d} features, got {features.shape[1]}")
        return features @ self.weights.T + self.bias

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.space.k, "weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SoftmaxModel":
        return cls(np.asarray(data["weights"], dtype=np.float64), np.asarray(data["bias"]), LabelSpace(data["k"]))


class Gradient(NamedTuple):
    """Gradient with the shape of the model parameters."""

    weights: np.ndarray
    bias: np.ndarray


def _example_weights(data: Dataset, example_weights: Optional[Sequence[float]]) -> np.ndarray:
    if data.n == 0:
        raise EmptyInputError("Cannot train on an empty dataset")
    if example_weights is None:
        return np.ones(data.n)
    weights = np.asarray(example_weights, dtype=np.float64).reshape(-1)
    if weights.shape[0] != data.n:
        raise DimensionMismatchError(f"{weights.shape[0]} example weights for {data.n} examples")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise InputDomainError("Example weights must be finite and nonnegative")
    if not np.any(weights > 0):
        raise DegenerateObjectiveError("All example weights are zero")
    return weights


def _loss_and_grad(model: SoftmaxModel, data: Dataset, weights: np.ndarray, l2: float) -> Tuple[float, Gradient]:
    log_probs = log_softmax(model.logits(data.features), axis=1)
    rows = np.arange(data.n)

    loss = -np.sum(weights * log_probs[rows, data.labels]) / data.n
    loss += 0.5 * l2 * np.sum(model.weights ** 2)

    residual = np.exp(log_probs)
    residual[rows, data.labels] -= 1.0
    residual = residual * weights[:, None] / data.n

    grad_weights = residual.T @ data.features + l2 * model.weights
    grad_bias = residual.sum(axis=0)
    return float(loss), Gradient(grad_weights, grad_bias)


def loss_and_grad(
    model: SoftmaxModel,
    data: Dataset,
    example_weights: Optional[Sequence[float]] = None,
    l2: float = 0.0,
) -> Tuple[float, Gradient]:
    """
    Weighted training objective and its exact gradient.

    Args:
        model: Current parameters
        data: Training examples
        example_weights: Per-example weights (default: all ones)
        l2: Penalty on ‖W‖²_F / 2

    Returns:
        (loss, Gradient)
    """
    if data.space.k != model.space.k:
        raise DimensionMismatchError(f"Model has k={model.space.k}, data has k={data.space.k}")
    if l2 < 0:
        raise InputDomainError(f"l2 must be nonnegative, got {l2}")
    return _loss_and_grad(model, data, _example_weights(data, example_weights), l2)


def train_softmax(
    data: Dataset,
    example_weights: Optional[Sequence[float]] = None,
    cfg: Optional[TrainConfig] = None,
    return_history: bool = False,
) -> Union[SoftmaxModel, Tuple[SoftmaxModel, List[float]]]:
    """
    Fit softmax regression by full-batch gradient descent.

    Args:
        data: Training examples
        example_weights: Per-example importance weights (None for unweighted ERM)
        cfg: Training settings
        return_history: Also return the objective before every step and after the last

    Returns:
        The trained model, or (model, losses) when ``return_history`` is set
    """
    cfg = cfg or TrainConfig()
    weights = _example_weights(data, example_weights)

    params_w = np.zeros((data.space.k, data.d))
    params_b = np.zeros(data.space.k)
    history: List[float] = []

    for _ in range(cfg.iterations):
        model = SoftmaxModel(params_w, params_b, data.space)
        loss, grad = _loss_and_grad(model, data, weights, cfg.l2)
        history.append(loss)
        params_w = params_w - cfg.learning_rate * grad.weights
        params_b = params_b - cfg.learning_rate * grad.bias

    model = SoftmaxModel(params_w, params_b, data.space)
    logger.debug(f"Trained softmax model on n={data.n}, d={data.d} for {cfg.iterations} steps")

    if return_history:
        history.append(_loss_and_grad(model, data, weights, cfg.l2)[0])
        return model, history
    return model


def predict(model: SoftmaxModel, features: np.ndarray, mode: Union[PredictionMode, str] = PredictionMode.HARD) -> np.ndarray:
    """
    Classifier outputs for a feature matrix.

    Soft mode returns softmax probability rows; hard mode the argmax with ties
    broken toward the lowest class index.
    """
    logits = model.logits(features)
    if PredictionMode(mode) is PredictionMode.SOFT:
        return softmax(logits, axis=1)
    return np.argmax(logits, axis=1).astype(np.int64)


def accuracy(model: SoftmaxModel, data: Dataset) -> float:
    """Fraction of examples whose hard prediction equals the label."""
    if data.n == 0:
        raise EmptyInputError("Cannot measure accuracy on an empty dataset")
    return float(np.mean(predict(model, data.features) == data.labels))
