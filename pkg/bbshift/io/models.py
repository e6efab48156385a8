"""
BBShift Model Files

Softmax model parameters as JSON. Floats are written with repr precision, so
a saved model loads back with bitwise-identical parameters.
"""

import json
from pathlib import Path
from typing import Union

from bbshift.core.exceptions import FormatError
from bbshift.model.softmax import SoftmaxModel

PathLike = Union[str, Path]


def save_model(path: PathLike, model: SoftmaxModel) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(model.to_dict(), f, indent=2)
        f.write("\n")


def load_model(path: PathLike) -> SoftmaxModel:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: not a model file: {e}") from e
    try:
        return SoftmaxModel.from_dict(data)
    except KeyError as e:
        raise FormatError(f"{path}: model file lacks {e}") from e
