"""
BBShift Result Tables

Experiment tables as CSV (17 significant digits, empty cells for values that
do not apply) or as a JSON list of records (nulls for the same).
"""

import json
import math
from pathlib import Path
from typing import Any, Union

import pandas as pd

from bbshift.core.exceptions import FormatError
from bbshift.io.predictions import FLOAT_FORMAT

PathLike = Union[str, Path]


def _plain(value: Any) -> Any:
    if value is None:
        return None
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def write_table(table: pd.DataFrame, path: PathLike, fmt: str = "csv") -> None:
    """
    Write a result table.

    Args:
        table: Result rows
        path: Output file
        fmt: ``csv`` or ``json``
    """
    if fmt == "csv":
        table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    elif fmt == "json":
        records = [{key: _plain(value) for key, value in row.items()} for row in table.to_dict(orient="records")]
        with open(path, "w", encoding="utf-8", newline="") as f:
            json.dump(records, f, indent=2, allow_nan=False)
            f.write("\n")
    else:
        raise FormatError(f"Unknown table format '{fmt}'")


def read_table(path: PathLike) -> pd.DataFrame:
    """Read a table written by write_table; the format follows the suffix."""
    if Path(path).suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as f:
            return pd.DataFrame(json.load(f))
    return pd.read_csv(path, float_precision="round_trip")
