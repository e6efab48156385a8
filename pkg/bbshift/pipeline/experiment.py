"""
BBShift Experiment Harness

Monte-Carlo studies of estimation error, detection calibration and power, and
correction accuracy under simulated label shift. Each run sweeps shift
settings × sample sizes × replications and returns one table row per
(shift setting, size, replication).

Replication r draws from ``SeededRng(seed).substream(r)``; inside a
replication every random role has its own child stream:

    0  shift marginal (Dirichlet draw)
    1  source training sample
    2  source hold-out sample (confusion matrix, detection)
    3  target estimation sample
    4  target evaluation sample (accuracy only)
    5  correction split seed

so the table is bitwise reproducible and independent of the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from tqdm import tqdm

from bbshift.core.config_loader import config_loader
from bbshift.core.estimation import estimate_weights
from bbshift.core.exceptions import ConfigError
from bbshift.core.types import LabelDistribution, LabelSpace, PredictionMode, Solver, SourceEval, TargetEval
from bbshift.detect.detector import DetectionMethod, detect_label_shift
from bbshift.model.dataset import Dataset
from bbshift.model.softmax import TrainConfig, predict
from bbshift.model.synthetic import gen_gaussian_mixture, separated_means
from bbshift.pipeline.correction import CorrectionConfig, RetrainOn, bbsc_correct, fit_black_box
from bbshift.simulation.resample import resample_by_label
from bbshift.simulation.rng import MAX_SEED, SeededRng
from bbshift.simulation.shifts import ShiftKind, ShiftSpec, true_weights
from bbshift.utils.logger import JSONLogger, get_logger

logger = get_logger(__name__)

COLUMNS = [
    "shift", "shift_kind", "class_index", "knockout_fraction", "rho", "concentration",
    "n", "m", "replication", "seed",
    "mse_w", "mse_mu", "sigma_min", "fallback",
    "p_value", "reject",
    "acc_baseline", "acc_corrected",
]


class ExperimentKind(str, Enum):
    """What a run measures."""

    ESTIMATION = "estimation"
    DETECTION = "detection"
    CORRECTION = "correction"


class SyntheticSource(BaseModel):
    """Gaussian mixture with class means ``separation · scale`` apart."""

    model_config = ConfigDict(frozen=True)

    type: Literal["synthetic"] = "synthetic"
    k: int = Field(default=3, ge=2)
    dim: Optional[int] = Field(default=None, ge=1)
    separation: float = Field(default=6.0, ge=0.0)
    scale: float = Field(default=1.0, gt=0.0)


class IdxSource(BaseModel):
    """
    Labeled IDX image/label pair. Even-indexed examples form the source pool
    and odd-indexed ones the target pool; samples are drawn by label-conditional
    resampling.
    """

    model_config = ConfigDict(frozen=True)

    type: Literal["idx"] = "idx"
    images: str
    labels: str
    k: int = Field(default=10, ge=2)


DataSource = Annotated[Union[SyntheticSource, IdxSource], Field(discriminator="type")]


class ExperimentConfig(BaseModel):
    """One experiment: a shift sweep × sizes (n = m) × replications."""

    model_config = ConfigDict(frozen=True)

    name: str = "experiment"
    kind: ExperimentKind
    shifts: List[ShiftSpec] = Field(min_length=1)
    sizes: List[int] = Field(min_length=1)
    replications: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    data: DataSource = Field(default_factory=SyntheticSource)
    train: TrainConfig = Field(default_factory=TrainConfig)
    mode: PredictionMode = PredictionMode.HARD
    delta: Optional[float] = Field(default=None, gt=0.0)
    solver: Solver = Solver.LU
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    method: DetectionMethod = DetectionMethod.CHI2
    retrain_on: RetrainOn = RetrainOn.FULL
    workers: int = Field(default=1, ge=1)
    progress: bool = False

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, sizes: List[int]) -> List[int]:
        if any(size < 2 for size in sizes):
            raise ValueError(f"Sample sizes must be at least 2, got {sizes}")
        return sizes

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Validate a plain mapping (e.g. parsed YAML); errors become ConfigError."""
        try:
            return cls(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid experiment configuration: {e}") from e

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return cls.from_dict(data)

    @classmethod
    def from_preset(cls, name: str, **overrides: Any) -> "ExperimentConfig":
        """Named preset from ``bbshift/config/experiments.yaml`` with optional overrides."""
        from bbshift.config import load_experiment_preset

        data = dict(load_experiment_preset(name))
        data.setdefault("name", name)
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls.from_dict(data)

    def sweep(self) -> List[ShiftSpec]:
        """Shift settings with per-class sweeps expanded, in configuration order."""
        points: List[ShiftSpec] = []
        for spec in self.shifts:
            if spec.kind is not ShiftKind.DIRICHLET and spec.class_index is None:
                points.extend(spec.for_class(c) for c in range(self.data.k))
            else:
                if spec.class_index is not None and spec.class_index >= self.data.k:
                    raise ConfigError(f"{spec.label()} names a class outside 0..{self.data.k - 1}")
                points.append(spec)
        return points


@dataclass(frozen=True)
class _Sampler:
    """Draws labeled samples with a requested label marginal."""

    space: LabelSpace
    synthetic: Optional[SyntheticSource] = None
    means: Optional[np.ndarray] = None
    source_pool: Optional[Dataset] = None
    target_pool: Optional[Dataset] = None

    @classmethod
    def build(cls, source: Union[SyntheticSource, IdxSource]) -> "_Sampler":
        space = LabelSpace(source.k)
        if isinstance(source, SyntheticSource):
            dim = source.dim or source.k
            means = np.zeros((source.k, dim))
            base = separated_means(source.k, source.separation, source.scale)
            width = min(dim, source.k)
            means[:, :width] = base[:, :width]
            return cls(space=space, synthetic=source, means=means)

        from bbshift.io.idx import load_idx

        pool = load_idx(source.images, source.labels, space)
        return cls(
            space=space,
            source_pool=pool.subset(np.arange(0, pool.n, 2)),
            target_pool=pool.subset(np.arange(1, pool.n, 2)),
        )

    def draw(self, q: LabelDistribution, size: int, rng: SeededRng, target: bool) -> Dataset:
        if self.synthetic is not None:
            return gen_gaussian_mixture(
                self.space, self.means.shape[1], self.means, self.synthetic.scale, q, size, rng
            )
        return resample_by_label(self.target_pool if target else self.source_pool, q, size, rng)


def _empty_row(spec: ShiftSpec, n: int, r: int, seed: int) -> Dict[str, Any]:
    return {
        "shift": spec.label(),
        "shift_kind": spec.kind.value,
        "class_index": spec.class_index,
        "knockout_fraction": spec.delta,
        "rho": spec.rho,
        "concentration": spec.alpha,
        "n": n,
        "m": n,
        "replication": r,
        "seed": seed,
        "mse_w": np.nan,
        "mse_mu": np.nan,
        "sigma_min": np.nan,
        "fallback": None,
        "p_value": np.nan,
        "reject": None,
        "acc_baseline": np.nan,
        "acc_corrected": np.nan,
    }


def run_replication(
    cfg: ExperimentConfig,
    sampler: _Sampler,
    spec: ShiftSpec,
    n: int,
    replication: int,
) -> Dict[str, Any]:
    """
    One table row.

    Args:
        cfg: Experiment configuration
        sampler: Data source
        spec: Concrete shift setting
        n: Sample size (n = m)
        replication: Replication index

    Returns:
        Row mapping keyed by ``COLUMNS``
    """
    rng = SeededRng(cfg.seed).substream(replication)
    row = _empty_row(spec, n, replication, cfg.seed)

    p, q = spec.source_target(sampler.space, rng.substream(0))
    w_true = true_weights(p, q)

    train = sampler.draw(p, n, rng.substream(1), target=False)
    target = sampler.draw(q, n, rng.substream(3), target=True)

    if cfg.kind is ExperimentKind.CORRECTION:
        evaluation = sampler.draw(q, n, rng.substream(4), target=True)
        split_seed = int(rng.substream(5).generator().integers(0, 2 ** 63 - 1))
        correction = CorrectionConfig(
            delta=cfg.delta,
            train_cfg=cfg.train,
            retrain_on=cfg.retrain_on,
            seed=split_seed,
            mode=cfg.mode,
            solver=cfg.solver,
        )
        result = bbsc_correct(train, target.features, correction, evaluation=evaluation)
        estimate = result.weights
        row.update(
            acc_baseline=result.baseline_accuracy,
            acc_corrected=result.target_accuracy,
        )
    else:
        black_box = fit_black_box(train, cfg.train)
        holdout = sampler.draw(p, n, rng.substream(2), target=False)
        source_eval = SourceEval(predict(black_box, holdout.features, cfg.mode), holdout.labels)
        target_eval = TargetEval(predict(black_box, target.features, cfg.mode))

        if cfg.kind is ExperimentKind.DETECTION:
            report = detect_label_shift(source_eval, target_eval, alpha=cfg.alpha, method=cfg.method, space=sampler.space)
            row.update(p_value=report.p_value, reject=report.reject)
            return row
        estimate, _, _ = estimate_weights(source_eval, target_eval, sampler.space, delta=cfg.delta, solver=cfg.solver)

    row.update(
        mse_w=float(np.sum((estimate.w - w_true) ** 2)),
        mse_mu=float(np.sum((estimate.mu_y - q.probs) ** 2)),
        sigma_min=estimate.sigma_min,
        fallback=estimate.fallback,
    )
    return row


def _json_logger(name: str) -> Optional[JSONLogger]:
    log_dir = config_loader.get_env("BBSHIFT_LOG_DIR") or config_loader.get("system.log_dir")
    return JSONLogger(f"experiment_{name}", str(log_dir)) if log_dir else None


def run_experiment(cfg: ExperimentConfig) -> pd.DataFrame:
    """
    Run every (shift setting, size, replication) of an experiment.

    Args:
        cfg: Experiment configuration

    Returns:
        DataFrame with ``COLUMNS``, rows ordered by shift setting, size and
        replication regardless of the worker count
    """
    sampler = _Sampler.build(cfg.data)
    tasks: List[Tuple[ShiftSpec, int, int]] = [
        (spec, n, r) for spec in cfg.sweep() for n in cfg.sizes for r in range(cfg.replications)
    ]
    logger.info(
        f"Experiment '{cfg.name}' ({cfg.kind.value}): {len(tasks)} replications, {cfg.workers} worker(s)"
    )
    records = _json_logger(cfg.name)

    def run(task: Tuple[ShiftSpec, int, int]) -> Dict[str, Any]:
        spec, n, r = task
        row = run_replication(cfg, sampler, spec, n, r)
        if records is not None:
            records.info("replication finished", **row)
        return row

    try:
        if cfg.workers == 1:
            rows = [run(task) for task in tqdm(tasks, disable=not cfg.progress, desc=cfg.name)]
        else:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                rows = list(tqdm(pool.map(run, tasks), total=len(tasks), disable=not cfg.progress, desc=cfg.name))
    finally:
        if records is not None:
            records.close()

    return pd.DataFrame(rows, columns=COLUMNS)


def summarize_experiment(table: pd.DataFrame) -> pd.DataFrame:
    """
    Medians per (shift, n) plus the rejection rate and the median accuracy gain.
    """
    grouped = table.groupby(["shift", "n"], sort=False)
    summary = grouped.agg(
        replications=("replication", "count"),
        mse_w=("mse_w", "median"),
        mse_mu=("mse_mu", "median"),
        sigma_min=("sigma_min", "median"),
        p_value=("p_value", "median"),
    ).reset_index()
    summary["reject_rate"] = grouped["reject"].apply(
        lambda col: float(np.mean(col.astype(float))) if col.notna().any() else np.nan
    ).to_numpy()
    gain = (table["acc_corrected"] - table["acc_baseline"]).groupby([table["shift"], table["n"]], sort=False).median()
    summary["acc_gain"] = gain.to_numpy()
    return summary


def loglog_slope(table: pd.DataFrame, column: str = "mse_w", shift: Optional[str] = None) -> float:
    """
    Least-squares slope of log(median column) against log n.

    Args:
        table: Experiment table
        column: Error column
        shift: Restrict to one shift label (default: pool every shift)

    Returns:
        Slope; −1 matches the O(1/n) consistency rate
    """
    if shift is not None:
        table = table[table["shift"] == shift]
    medians = table.groupby("n")[column].median()
    if medians.size < 2:
        raise ConfigError("Need at least two sample sizes for a slope")
    slope, _ = np.polyfit(np.log(medians.index.to_numpy(dtype=float)), np.log(medians.to_numpy(dtype=float)), 1)
    return float(slope)
