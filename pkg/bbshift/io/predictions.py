"""
BBShift Prediction Files

Comma-separated classifier outputs with a mandatory header. The header
declares the schema:

- hard: ``y_pred`` and optionally ``y_true``
- soft: ``p0,...,p{k-1}`` and optionally ``y_true``

A file with ``y_true`` loads as a SourceEval, one without as a TargetEval.
Reals are written with 17 significant digits so values survive a round trip.
"""

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from bbshift.core.exceptions import EmptyInputError, FormatError, InputDomainError
from bbshift.core.types import LabelSpace, SourceEval, TargetEval, rescale_loose_rows
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)

ROW_SUM_TOL = 1e-6
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def read_table_strict(path: PathLike) -> pd.DataFrame:
    """
    Read a headed CSV file as strings, rejecting rows with a wrong field count.

    Data row i (0-based) sits on line i + 2 of the file. The header is read as
    an ordinary row so that a longer first data row is an error rather than
    an implicit index column.
    """
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as e:
        raise EmptyInputError(f"{path}: file is empty") from e
    except pd.errors.ParserError as e:
        raise FormatError(f"{path}: malformed row: {e}") from e

    frame = raw.iloc[1:].reset_index(drop=True)
    frame.columns = [str(c).strip() for c in raw.iloc[0]]
    blanks = (frame.isna() | (frame == "")).to_numpy()
    if blanks.any():
        row = int(np.argwhere(blanks)[0][0])
        raise FormatError(f"{path}: line {row + 2}: missing value")
    return frame


def parse_column(frame: pd.DataFrame, column: str, path: PathLike, integral: bool = False) -> np.ndarray:
    """Numeric column; the first unparsable cell is reported with its line number."""
    try:
        values = frame[column].to_numpy(dtype=str).astype(np.float64)
    except ValueError:
        values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        raise FormatError(f"{path}: line {row + 2}: cannot parse {column}={frame[column].iloc[row]!r}")
    if integral:
        frac = np.flatnonzero(values != np.round(values))
        if frac.size:
            raise FormatError(f"{path}: line {int(frac[0]) + 2}: {column} must be an integer")
        return values.astype(np.int64)
    return values


def check_labels(labels: np.ndarray, space: LabelSpace, column: str, path: PathLike) -> None:
    bad = np.flatnonzero((labels < 0) | (labels >= space.k))
    if bad.size:
        row = int(bad[0])
        raise InputDomainError(f"{path}: line {row + 2}: {column}={labels[row]} outside 0..{space.k - 1}")


def load_predictions(path: PathLike, space: LabelSpace) -> Union[SourceEval, TargetEval]:
    """
    Load a prediction file.

    Args:
        path: CSV file
        space: Label space

    Returns:
        SourceEval when the file has ``y_true``, otherwise TargetEval
    """
    frame = read_table_strict(path)
    if frame.empty:
        raise EmptyInputError(f"{path}: no prediction rows")

    columns = list(frame.columns)
    has_truth = "y_true" in columns
    others = [c for c in columns if c != "y_true"]
    prob_columns = [f"p{i}" for i in range(space.k)]

    if others == ["y_pred"]:
        preds = parse_column(frame, "y_pred", path, integral=True)
        check_labels(preds, space, "y_pred", path)
    elif others == prob_columns:
        preds = np.column_stack([parse_column(frame, c, path) for c in prob_columns])
        negative = np.flatnonzero((preds < 0).any(axis=1))
        if negative.size:
            raise InputDomainError(f"{path}: line {int(negative[0]) + 2}: negative probability")
        sums = preds.sum(axis=1)
        off = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if off.size:
            row = int(off[0])
            raise InputDomainError(
                f"{path}: line {row + 2}: probabilities sum to {sums[row]:.10g}, not 1 (simplex violation)"
            )
        preds = rescale_loose_rows(preds)
    else:
        raise FormatError(
            f"{path}: unrecognized header {','.join(columns)}; expected y_pred or {','.join(prob_columns)}"
            " with optional y_true"
        )

    if has_truth:
        labels = parse_column(frame, "y_true", path, integral=True)
        check_labels(labels, space, "y_true", path)
        logger.debug(f"Loaded {len(frame)} labeled predictions from {path}")
        return SourceEval(preds, labels)
    logger.debug(f"Loaded {len(frame)} unlabeled predictions from {path}")
    return TargetEval(preds)


def save_predictions(
    path: PathLike,
    preds: Union[np.ndarray, Sequence],
    labels: Optional[Sequence[int]] = None,
) -> None:
    """
    Write predictions in the schema their shape implies.

    Args:
        path: Output CSV file
        preds: Class indices (hard) or probability rows (soft)
        labels: True labels, written as ``y_true`` when given
    """
    preds = np.asarray(preds)
    columns = {}
    if labels is not None:
        columns["y_true"] = np.asarray(labels, dtype=np.int64)
    if preds.ndim == 1:
        columns["y_pred"] = preds.astype(np.int64)
    elif preds.ndim == 2:
        for i in range(preds.shape[1]):
            columns[f"p{i}"] = preds[:, i].astype(np.float64)
    else:
        raise FormatError(f"Predictions must be 1-D or 2-D, got {preds.ndim}-D")
    pd.DataFrame(columns).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
