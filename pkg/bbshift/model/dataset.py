"""
BBShift Dataset

Labeled feature matrix over a label space.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from bbshift.core.exceptions import FormatError, InputDomainError
from bbshift.core.types import LabelSpace


@dataclass(frozen=True)
class Dataset:
    """
    Feature matrix (n×d, float64) with integer labels in 0..k-1.
    """

    features: np.ndarray
    labels: np.ndarray
    space: LabelSpace

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2:
            raise FormatError(f"Features must be an n×d matrix, got shape {features.shape}")

        raw_labels = np.asarray(self.labels).reshape(-1)
        labels = raw_labels.astype(np.int64)
        if raw_labels.size and not np.array_equal(labels, raw_labels):
            raise InputDomainError("Labels must be integral class indices")
        if features.shape[0] != labels.shape[0]:
            raise FormatError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
        if not np.all(np.isfinite(features)):
            raise InputDomainError("Features must be finite (found NaN or infinity)")
        self.space.check_labels(labels)

        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    def __len__(self) -> int:
        return self.n

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Rows selected by position (repeats allowed)."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices], self.space)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.space.k)

    @classmethod
    def empty(cls, space: LabelSpace, d: int) -> "Dataset":
        return cls(np.zeros((0, d)), np.zeros(0, dtype=np.int64), space)
