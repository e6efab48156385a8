"""
BBShift Report Documents

Structured results of an estimation, detection or correction run with
``weights``, ``detection``, ``correction`` and ``meta`` sections. Reports
serialize to JSON or to a two-column CSV (``field,value``) whose values are
JSON-encoded; both forms parse back to an equal document.

``meta.timestamp`` is only filled when BBSHIFT_REPORT_TIMESTAMPS is true, so
by default identical runs produce byte-identical reports.
"""

import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
import scipy
from pydantic import BaseModel, ConfigDict, Field, model_validator

from bbshift import __version__
from bbshift.core.config_loader import config_loader
from bbshift.core.exceptions import FormatError
from bbshift.core.types import WeightEstimate
from bbshift.detect.detector import DetectionMethod, ShiftReport

PathLike = Union[str, Path]


class WeightsSection(BaseModel):
    """Importance-weight estimate."""

    model_config = ConfigDict(frozen=True)

    w: List[float]
    w_raw: List[float]
    mu_y: List[float]
    sigma_min: float = Field(ge=0.0)
    fallback: bool
    clipped: List[bool]
    bound: Optional[float] = None
    mu_y_normalized: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check(self) -> "WeightsSection":
        k = len(self.w)
        if any(len(v) != k for v in (self.w_raw, self.mu_y, self.clipped)):
            raise ValueError("w, w_raw, mu_y and clipped must have equal length")
        if any(x < 0 for x in self.w):
            raise ValueError("weights must be nonnegative")
        if self.fallback and any(x != 1.0 for x in self.w):
            raise ValueError("fallback estimates carry all-ones weights")
        return self

    @classmethod
    def from_estimate(cls, estimate: WeightEstimate, normalize: bool = False) -> "WeightsSection":
        data = estimate.to_dict()
        if normalize:
            data["mu_y_normalized"] = estimate.normalized_mu_y().to_list()
        return cls(**data)


class DetectionSection(BaseModel):
    """Shift test outcome."""

    model_config = ConfigDict(frozen=True)

    method: DetectionMethod
    statistic: float = Field(ge=0.0)
    p_value: float = Field(ge=0.0, le=1.0)
    alpha: float = Field(gt=0.0, lt=1.0)
    reject: bool
    n: int = Field(ge=0)
    m: int = Field(ge=0)

    @model_validator(mode="after")
    def _check(self) -> "DetectionSection":
        if self.reject != (self.p_value < self.alpha):
            raise ValueError("reject must equal (p_value < alpha)")
        return self

    @classmethod
    def from_report(cls, report: ShiftReport) -> "DetectionSection":
        n, m = report.sample_sizes
        return cls(
            method=report.method,
            statistic=report.statistic,
            p_value=report.p_value,
            alpha=report.alpha,
            reject=report.reject,
            n=n,
            m=m,
        )


class CorrectionSection(BaseModel):
    """Correction summary; model parameters live in their own files."""

    model_config = ConfigDict(frozen=True)

    reweighted: bool
    retrain_on: str
    target_accuracy: Optional[float] = None
    baseline_accuracy: Optional[float] = None


class MetaSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=2)
    seed: Optional[int] = None
    command: Optional[str] = None
    versions: Dict[str, str] = Field(default_factory=dict)
    timestamp: Optional[str] = None

    @classmethod
    def current(cls, k: int, seed: Optional[int] = None, command: Optional[str] = None) -> "MetaSection":
        """Meta section for a report produced now."""
        timestamp = None
        if config_loader.get_bool_env("BBSHIFT_REPORT_TIMESTAMPS", False):
            timestamp = datetime.now(timezone.utc).isoformat()
        versions = {"bbshift": __version__, "numpy": np.__version__, "scipy": scipy.__version__}
        return cls(k=k, seed=seed, command=command, versions=versions, timestamp=timestamp)


class ReportDocument(BaseModel):
    """Result document written by the CLI."""

    model_config = ConfigDict(frozen=True)

    weights: Optional[WeightsSection] = None
    detection: Optional[DetectionSection] = None
    correction: Optional[CorrectionSection] = None
    meta: MetaSection

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        try:
            return cls.model_validate(json.loads(text))
        except json.JSONDecodeError as e:
            raise FormatError(f"Report is not valid JSON: {e}") from e

    def to_csv(self) -> str:
        """``field,value`` rows; nested keys joined by dots, values JSON-encoded."""
        rows = []
        for section, content in self.model_dump(mode="json").items():
            if content is None:
                continue
            for field, value in content.items():
                rows.append((f"{section}.{field}", json.dumps(value)))
        buffer = io.StringIO()
        pd.DataFrame(rows, columns=["field", "value"]).to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ReportDocument":
        try:
            frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise FormatError(f"Malformed report CSV: {e}") from e
        if list(frame.columns) != ["field", "value"]:
            raise FormatError(f"Report CSV header must be field,value, got {','.join(frame.columns)}")

        data: Dict[str, Dict[str, Any]] = {}
        for line, (key, raw) in enumerate(zip(frame["field"], frame["value"]), start=2):
            section, _, field = key.partition(".")
            if not field:
                raise FormatError(f"Report CSV line {line}: field '{key}' is not section.name")
            try:
                data.setdefault(section, {})[field] = json.loads(raw)
            except json.JSONDecodeError as e:
                raise FormatError(f"Report CSV line {line}: bad value: {e}") from e
        return cls.model_validate(data)

    def serialize(self, fmt: str = "json") -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise FormatError(f"Unknown report format '{fmt}'")

    @classmethod
    def parse(cls, text: str, fmt: str = "json") -> "ReportDocument":
        if fmt == "json":
            return cls.from_json(text)
        if fmt == "csv":
            return cls.from_csv(text)
        raise FormatError(f"Unknown report format '{fmt}'")


def write_report(report: ReportDocument, path: PathLike, fmt: str = "json") -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(report.serialize(fmt))


def read_report(path: PathLike, fmt: Optional[str] = None) -> ReportDocument:
    """Read a report; the format defaults to the file suffix."""
    fmt = fmt or Path(path).suffix.lstrip(".").lower() or "json"
    with open(path, "r", encoding="utf-8") as f:
        return ReportDocument.parse(f.read(), fmt)
