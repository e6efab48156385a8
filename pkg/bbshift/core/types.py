"""
BBShift Core Types

Value objects shared by every module: the label space, distributions over it,
classifier outputs on source and target data, the joint confusion matrix and
the importance-weight estimate.

Labels are 0-indexed (0..k-1). Confusion matrices are oriented with rows for
the predicted label and columns for the true label. All arrays are float64
(labels int64) and are made read-only on construction.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from bbshift.core.exceptions import EmptyInputError, FormatError, InputDomainError

SIMPLEX_TOL = 1e-12
SOFT_ROW_TOL = 1e-9
ROW_RESCALE_TOL = 1e-13


class PredictionMode(str, Enum):
    """Kind of classifier output."""

    HARD = "hard"    # one class index per example
    SOFT = "soft"    # one probability vector per example


class Solver(str, Enum):
    """Linear solver used for the weight system."""

    LU = "lu"
    PSEUDOINVERSE = "pseudoinverse"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def rescale_loose_rows(soft: np.ndarray) -> np.ndarray:
    """
    Rescale the probability rows whose sum is more than ROW_RESCALE_TOL away from 1.

    Rows already on the simplex to that precision keep their values bit for bit.
    """
    sums = soft.sum(axis=1)
    loose = np.abs(sums - 1.0) > ROW_RESCALE_TOL
    if not loose.any():
        return soft
    soft = soft.copy()
    soft[loose] /= sums[loose, None]
    return soft


@dataclass(frozen=True)
class LabelSpace:
    """The discrete label domain {0, ..., k-1}."""

    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 2:
            raise InputDomainError(f"Label space needs k >= 2, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    def check_labels(self, labels: np.ndarray, what: str = "label") -> None:
        """Raise InputDomainError if any entry lies outside 0..k-1."""
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            bad = labels[(labels < 0) | (labels >= self.k)][0]
            raise InputDomainError(f"{what} {int(bad)} outside label space 0..{self.k - 1}")


@dataclass(frozen=True)
class LabelDistribution:
    """A point on the k-simplex (p(y), q(y), or a predicted-label marginal)."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 2:
            raise FormatError(f"Distribution must be a vector of length >= 2, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InputDomainError("Distribution entries must be finite and nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise InputDomainError(f"Distribution sums to {total!r}, not 1")
        object.__setattr__(self, "probs", _frozen(probs))

    @property
    def k(self) -> int:
        return int(self.probs.size)

    @classmethod
    def uniform(cls, space: LabelSpace) -> "LabelDistribution":
        return cls(np.full(space.k, 1.0 / space.k))

    @classmethod
    def from_counts(cls, counts: Sequence[float]) -> "LabelDistribution":
        counts = np.asarray(counts, dtype=np.float64)
        total = counts.sum()
        if total <= 0:
            raise EmptyInputError("Cannot build a distribution from zero counts")
        return cls(counts / total)

    @classmethod
    def normalized(cls, values: Sequence[float]) -> "LabelDistribution":
        """Rescale nonnegative values onto the simplex."""
        return cls.from_counts(values)

    def to_list(self):
        return self.probs.tolist()


def _as_predictions(preds: Any) -> np.ndarray:
    """
    Convert per-example predictions to an array.

    Hard predictions become an int64 vector, soft predictions a float64
    matrix with one row per example. A sequence mixing scalars and vectors is
    rejected.
    """
    if isinstance(preds, np.ndarray):
        array = preds
    else:
        preds = list(preds)
        kinds = {np.ndim(p) for p in preds}
        if len(kinds) > 1:
            raise FormatError("Predictions mix hard labels and probability vectors")
        try:
            array = np.asarray(preds)
        except ValueError as e:
            raise FormatError(f"Ragged probability vectors: {e}") from e

    if array.ndim == 1:
        if array.size and not np.all(np.isfinite(array.astype(np.float64))):
            raise InputDomainError("Hard predictions must be finite")
        as_int = array.astype(np.int64)
        if array.size and not np.array_equal(as_int, array):
            raise FormatError("Hard predictions must be integral class indices")
        return as_int
    if array.ndim == 2:
        soft = array.astype(np.float64)
        if not np.all(np.isfinite(soft)) or np.any(soft < 0):
            raise InputDomainError("Probability vectors must be finite and nonnegative")
        sums = soft.sum(axis=1)
        off = np.flatnonzero(np.abs(sums - 1.0) > SOFT_ROW_TOL)
        if off.size:
            raise InputDomainError(
                f"Probability vector of example {int(off[0])} sums to {sums[off[0]]!r}, not 1"
            )
        return rescale_loose_rows(soft)
    raise FormatError(f"Predictions must be 1-D (hard) or 2-D (soft), got {array.ndim}-D")


def _mode_of(preds: np.ndarray) -> PredictionMode:
    return PredictionMode.HARD if preds.ndim == 1 else PredictionMode.SOFT


@dataclass(frozen=True)
class TargetEval:
    """Classifier outputs on unlabeled target data."""

    preds: np.ndarray

    def __post_init__(self):
        preds = _as_predictions(self.preds)
        if preds.shape[0] == 0:
            raise EmptyInputError("Target evaluation has no examples")
        object.__setattr__(self, "preds", _frozen(preds))

    @property
    def m(self) -> int:
        return int(self.preds.shape[0])

    @property
    def mode(self) -> PredictionMode:
        return _mode_of(self.preds)


@dataclass(frozen=True)
class SourceEval:
    """Classifier outputs on labeled source data."""

    preds: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        preds = _as_predictions(self.preds)
        labels = _as_predictions(np.asarray(self.labels).reshape(-1))
        if preds.shape[0] == 0:
            raise EmptyInputError("Source evaluation has no examples")
        if preds.shape[0] != labels.shape[0]:
            raise FormatError(
                f"Source has {preds.shape[0]} predictions but {labels.shape[0]} labels"
            )
        object.__setattr__(self, "preds", _frozen(preds))
        object.__setattr__(self, "labels", _frozen(labels))

    @property
    def n(self) -> int:
        return int(self.preds.shape[0])

    @property
    def mode(self) -> PredictionMode:
        return _mode_of(self.preds)


Evaluation = Union[SourceEval, TargetEval]


@dataclass(frozen=True)
class ConfusionMatrix:
    """
    Joint estimate of p(f(x)=i, y=j): rows are predicted labels, columns true labels.

    Column sums give the empirical label marginal and row sums the empirical
    predicted-label marginal.
    """

    entries: np.ndarray
    mode: PredictionMode
    n: int

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise FormatError(f"Confusion matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)) or np.any(entries < 0):
            raise InputDomainError("Confusion matrix entries must be finite and nonnegative")
        if abs(entries.sum() - 1.0) > SIMPLEX_TOL:
            raise InputDomainError(f"Confusion matrix sums to {entries.sum()!r}, not 1")
        object.__setattr__(self, "entries", _frozen(entries))
        object.__setattr__(self, "mode", PredictionMode(self.mode))
        object.__setattr__(self, "n", int(self.n))

    @property
    def k(self) -> int:
        return int(self.entries.shape[0])

    def label_marginal(self) -> np.ndarray:
        """Column sums (empirical p(y))."""
        return self.entries.sum(axis=0)

    def pred_marginal(self) -> np.ndarray:
        """Row sums (empirical p(ŷ))."""
        return self.entries.sum(axis=1)

    def conditional(self) -> np.ndarray:
        """C_{ŷ|y}: each column divided by its sum; empty columns stay zero."""
        col = self.label_marginal()
        out = np.zeros_like(self.entries)
        nonzero = col > 0
        out[:, nonzero] = self.entries[:, nonzero] / col[nonzero]
        return out


@dataclass(frozen=True)
class WeightEstimate:
    """
    Estimated importance weights q(y)/p(y) with solve diagnostics.

    ``mu_y`` is diag(ν̂_y)·w as computed; after clipping it may not sum to one
    (see ``normalized_mu_y``).
    """

    w: np.ndarray
    w_raw: np.ndarray
    sigma_min: float
    fallback: bool
    clipped: np.ndarray
    mu_y: np.ndarray
    bound: Optional[float] = None

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        if np.any(w < 0):
            raise InputDomainError("Importance weights must be nonnegative")
        if self.fallback and not np.all(w == 1.0):
            raise InputDomainError("Fallback estimates must carry all-ones weights")
        object.__setattr__(self, "w", _frozen(w))
        object.__setattr__(self, "w_raw", _frozen(np.array(self.w_raw, dtype=np.float64)))
        object.__setattr__(self, "clipped", _frozen(np.array(self.clipped, dtype=bool)))
        object.__setattr__(self, "mu_y", _frozen(np.array(self.mu_y, dtype=np.float64)))
        object.__setattr__(self, "sigma_min", float(self.sigma_min))
        object.__setattr__(self, "fallback", bool(self.fallback))

    @property
    def k(self) -> int:
        return int(self.w.size)

    def normalized_mu_y(self) -> LabelDistribution:
        """q(y) estimate rescaled to the simplex, for reporting only."""
        return LabelDistribution.normalized(self.mu_y)

    def residual(self, confusion: ConfusionMatrix, mu_hat: LabelDistribution) -> float:
        """‖C·w − μ̂_ŷ‖∞ for the reported weights."""
        return float(np.max(np.abs(confusion.entries @ self.w - mu_hat.probs)))

    def example_weights(self, labels: np.ndarray) -> np.ndarray:
        """Per-example weights w[y_i] for weighted ERM."""
        return self.w[np.asarray(labels, dtype=np.int64)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "w": self.w.tolist(),
            "w_raw": self.w_raw.tolist(),
            "mu_y": self.mu_y.tolist(),
            "sigma_min": self.sigma_min,
            "fallback": self.fallback,
            "clipped": self.clipped.tolist(),
            "bound": self.bound,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WeightEstimate":
        return cls(
            w=data["w"],
            w_raw=data["w_raw"],
            sigma_min=data["sigma_min"],
            fallback=data["fallback"],
            clipped=data["clipped"],
            mu_y=data["mu_y"],
            bound=data.get("bound"),
        )
