"""
BBShift CLI commands

This module defines the subcommands of the BBShift command line interface.
Every command takes the parsed arguments and returns a process exit code.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from bbshift.core.config_loader import config_loader
from bbshift.core.estimation import default_delta, estimate_weights, validate_delta
from bbshift.core.exceptions import ConfigError, FormatError
from bbshift.core.types import LabelDistribution, LabelSpace, PredictionMode, SourceEval
from bbshift.detect.detector import detect_label_shift
from bbshift.io.datasets import load_dataset_csv, load_features_csv, save_dataset
from bbshift.io.models import save_model
from bbshift.io.predictions import load_predictions
from bbshift.io.report import (
    CorrectionSection,
    DetectionSection,
    MetaSection,
    ReportDocument,
    WeightsSection,
    write_report,
)
from bbshift.io.tables import write_table
from bbshift.model.dataset import Dataset
from bbshift.model.softmax import TrainConfig
from bbshift.model.synthetic import gen_gaussian_mixture, separated_means
from bbshift.pipeline.correction import CorrectionConfig, bbsc_correct
from bbshift.pipeline.experiment import ExperimentConfig, run_experiment, summarize_experiment
from bbshift.simulation.resample import resample_by_label
from bbshift.simulation.rng import SeededRng
from bbshift.simulation.shifts import ShiftKind, ShiftSpec, apply_knockout, dirichlet_shift, tweak_one
from bbshift.utils.logger import get_logger

logger = get_logger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SHIFT_DETECTED = 3


def _space(args: argparse.Namespace) -> LabelSpace:
    if args.k < 2:
        raise ConfigError(f"--k must be at least 2, got {args.k}")
    return LabelSpace(args.k)


def _seed(args: argparse.Namespace) -> int:
    return 0 if args.seed is None else args.seed


def _emit(report: ReportDocument, out: Optional[str], fmt: str) -> None:
    """Write the report to --out, or to stdout when no file is given."""
    if out:
        write_report(report, out, fmt)
        logger.info(f"Report written to {out}")
    else:
        sys.stdout.write(report.serialize(fmt))


def _check_mode(evaluation, mode: Optional[str], path: str) -> None:
    if mode and evaluation.mode is not PredictionMode(mode):
        raise FormatError(f"{path} holds {evaluation.mode.value} predictions but --mode is {mode}")


def estimate_command(args: argparse.Namespace) -> int:
    """
    Estimate importance weights from source and target prediction files.

    Args:
        args: Parsed command line arguments

    Returns:
        Exit code
    """
    space = _space(args)
    delta = validate_delta(default_delta(space.k) if args.delta is None else args.delta, space.k)
    solver = args.solver or config_loader.get("estimation.solver", "lu")

    source = load_predictions(args.source, space)
    target = load_predictions(args.target, space)
    if not isinstance(source, SourceEval):
        raise FormatError(f"{args.source} has no y_true column; estimation needs labeled source predictions")
    _check_mode(source, args.mode, args.source)
    _check_mode(target, args.mode, args.target)

    estimate, _, _ = estimate_weights(source, target, space, delta=delta, solver=solver)
    report = ReportDocument(
        weights=WeightsSection.from_estimate(estimate, normalize=args.normalize),
        meta=MetaSection.current(space.k, args.seed, "estimate"),
    )
    _emit(report, args.out, args.format)
    return EXIT_OK


def detect_command(args: argparse.Namespace) -> int:
    """
    Test for label shift between source and target predictions.

    Returns:
        0 when no shift is detected, 3 when the null hypothesis is rejected
    """
    space = _space(args)
    source = load_predictions(args.source, space)
    target = load_predictions(args.target, space)
    _check_mode(source, args.mode, args.source)
    _check_mode(target, args.mode, args.target)

    report = detect_label_shift(source, target, alpha=args.alpha, method=args.method, space=space)
    document = ReportDocument(
        detection=DetectionSection.from_report(report),
        meta=MetaSection.current(space.k, args.seed, "detect"),
    )
    _emit(document, args.out, args.format)
    if report.reject:
        logger.info(f"Shift detected: p={report.p_value:.4g} < alpha={report.alpha}")
        return EXIT_SHIFT_DETECTED
    return EXIT_OK


def correct_command(args: argparse.Namespace) -> int:
    """
    Run black box shift correction and write the corrected model, the
    unweighted baseline and a report into the --out directory.
    """
    space = _space(args)
    train_cfg = TrainConfig(
        learning_rate=args.learning_rate or config_loader.get("training.learning_rate", 0.5),
        iterations=config_loader.get("training.iterations", 300) if args.iterations is None else args.iterations,
        l2=config_loader.get("training.l2", 0.0) if args.l2 is None else args.l2,
        seed=_seed(args),
    )
    cfg = CorrectionConfig.from_config(
        delta=args.delta,
        train_cfg=train_cfg,
        split_fraction=args.split_fraction,
        retrain_on=args.retrain_on,
        seed=_seed(args),
        mode=args.mode,
        solver=args.solver,
        detect_first=True if args.detect_first else None,
        detection_alpha=args.alpha,
        detection_method=args.method,
        reuse_split=True if args.reuse_split else None,
    )
    validate_delta(default_delta(space.k) if cfg.delta is None else cfg.delta, space.k)

    train = load_dataset_csv(args.source, space)
    target_features, target_labels = load_features_csv(args.target, space)
    evaluation = Dataset(target_features, target_labels, space) if target_labels is not None else None

    result = bbsc_correct(train, target_features, cfg, evaluation=evaluation)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(out_dir / "model.json", result.model)
    save_model(out_dir / "baseline.json", result.baseline)
    report = ReportDocument(
        weights=WeightsSection.from_estimate(result.weights, normalize=args.normalize),
        detection=DetectionSection.from_report(result.detection) if result.detection else None,
        correction=CorrectionSection(
            reweighted=result.reweighted,
            retrain_on=cfg.retrain_on.value,
            target_accuracy=result.target_accuracy,
            baseline_accuracy=result.baseline_accuracy,
        ),
        meta=MetaSection.current(space.k, _seed(args), "correct"),
    )
    write_report(report, out_dir / f"report.{args.format}", args.format)
    logger.info(f"Corrected model, baseline and report written to {out_dir}")
    return EXIT_OK


def _shift_from_args(args: argparse.Namespace) -> ShiftSpec:
    if args.shift is None:
        raise ConfigError("--shift is required")
    kind = ShiftKind(args.shift)
    values = {"kind": kind}
    if kind is ShiftKind.KNOCKOUT:
        values.update(class_index=args.shift_class, delta=args.knockout_fraction)
    elif kind is ShiftKind.TWEAK_ONE:
        values.update(class_index=args.shift_class, rho=args.rho)
    else:
        values.update(alpha=args.concentration)
    return ShiftSpec(**values)


def simulate_command(args: argparse.Namespace) -> int:
    """
    Draw a label-shifted dataset.

    Knock-out is applied to the label marginal of the pool (uniform for
    synthetic data); tweak-one and Dirichlet set the marginal directly.
    Without --source the examples come from a separated Gaussian mixture.
    """
    space = _space(args)
    spec = _shift_from_args(args)
    if spec.kind is not ShiftKind.DIRICHLET and spec.class_index is None:
        raise ConfigError("--shift-class is required for knockout and tweak_one")
    rng = SeededRng(_seed(args))

    pool = load_dataset_csv(args.source, space) if args.source else None
    if spec.kind is ShiftKind.KNOCKOUT:
        base = LabelDistribution.from_counts(pool.class_counts()) if pool else LabelDistribution.uniform(space)
        marginal = apply_knockout(base, spec.class_index, spec.delta)
    elif spec.kind is ShiftKind.TWEAK_ONE:
        marginal = tweak_one(space, spec.class_index, spec.rho)
    else:
        marginal = dirichlet_shift(space, spec.alpha, rng.substream(0))

    if pool is not None:
        data = resample_by_label(pool, marginal, args.n, rng.substream(1))
    else:
        means = separated_means(space.k, args.separation, args.scale)
        data = gen_gaussian_mixture(space, space.k, means, args.scale, marginal, args.n, rng.substream(1))

    save_dataset(args.out, data, args.format)
    logger.info(f"Wrote {data.n} examples with label marginal {np.round(marginal.probs, 4).tolist()} to {args.out}")
    return EXIT_OK


def experiment_command(args: argparse.Namespace) -> int:
    """Run an experiment preset or YAML configuration and write its result table."""
    if bool(args.preset) == bool(args.config):
        raise ConfigError("Give exactly one of --preset or --config")
    overrides = {"seed": args.seed, "workers": args.workers, "replications": args.replications}
    if args.preset:
        cfg = ExperimentConfig.from_preset(args.preset, **overrides)
    else:
        base = ExperimentConfig.from_yaml(args.config)
        data = base.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        cfg = ExperimentConfig.from_dict(data)

    table = run_experiment(cfg)
    write_table(table, args.out, args.format)
    print(summarize_experiment(table).to_string(index=False))
    logger.info(f"Experiment table with {len(table)} rows written to {args.out}")
    return EXIT_OK
