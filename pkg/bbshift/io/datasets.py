"""
BBShift Dataset Files

Labeled feature tables in CSV form: header ``y_true,x0,...,x{d-1}``.
Datasets can also be written as JSON records with the same keys.
"""

from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from bbshift.core.exceptions import EmptyInputError, FormatError
from bbshift.core.types import LabelSpace
from bbshift.io.predictions import FLOAT_FORMAT, check_labels, parse_column, read_table_strict
from bbshift.io.tables import write_table
from bbshift.model.dataset import Dataset

PathLike = Union[str, Path]


def load_dataset_csv(path: PathLike, space: LabelSpace) -> Dataset:
    """
    Load a labeled dataset.

    Args:
        path: CSV file with ``y_true`` and feature columns ``x0..``
        space: Label space

    Returns:
        Dataset
    """
    frame = read_table_strict(path)
    if frame.empty:
        raise EmptyInputError(f"{path}: no rows")
    columns = list(frame.columns)
    d = len(columns) - 1
    expected = ["y_true"] + [f"x{j}" for j in range(d)]
    if d < 1 or columns != expected:
        raise FormatError(f"{path}: header must be y_true,x0,...,x{{d-1}}, got {','.join(columns)}")

    labels = parse_column(frame, "y_true", path, integral=True)
    check_labels(labels, space, "y_true", path)
    features = np.column_stack([parse_column(frame, c, path) for c in expected[1:]])
    return Dataset(features, labels, space)


def dataset_frame(data: Dataset) -> pd.DataFrame:
    """One row per example: ``y_true`` then the feature columns ``x0..``."""
    columns = {"y_true": data.labels}
    for j in range(data.d):
        columns[f"x{j}"] = data.features[:, j]
    return pd.DataFrame(columns)


def save_dataset_csv(path: PathLike, data: Dataset) -> None:
    """Write a dataset with 17-significant-digit features."""
    dataset_frame(data).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def save_dataset(path: PathLike, data: Dataset, fmt: str = "csv") -> None:
    """
    Write a dataset as CSV or as a JSON list of ``{"y_true", "x0", ...}`` records.

    Args:
        path: Output file
        data: Dataset to write
        fmt: ``csv`` or ``json``
    """
    if fmt == "csv":
        save_dataset_csv(path, data)
    else:
        write_table(dataset_frame(data), path, fmt)


def load_features_csv(path: PathLike, space: LabelSpace) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Load a feature table whose ``y_true`` column is optional.

    Returns:
        (features, labels or None)
    """
    frame = read_table_strict(path)
    if frame.empty:
        raise EmptyInputError(f"{path}: no rows")
    columns = list(frame.columns)
    has_truth = bool(columns) and columns[0] == "y_true"
    feature_columns = columns[1:] if has_truth else columns
    if not feature_columns or feature_columns != [f"x{j}" for j in range(len(feature_columns))]:
        raise FormatError(f"{path}: header must be [y_true,]x0,...,x{{d-1}}, got {','.join(columns)}")

    features = np.column_stack([parse_column(frame, c, path) for c in feature_columns])
    labels = None
    if has_truth:
        labels = parse_column(frame, "y_true", path, integral=True)
        check_labels(labels, space, "y_true", path)
    return features, labels
