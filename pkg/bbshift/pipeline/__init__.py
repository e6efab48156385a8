"""
BBShift Pipeline package

This module contains black box shift correction (train, estimate weights,
retrain by importance-weighted ERM) and the Monte-Carlo experiment harness
that measures estimation error, detection calibration and power, and
correction accuracy.
"""

from bbshift.pipeline.correction import (
    CorrectionConfig,
    CorrectionResult,
    RetrainOn,
    bbsc_correct,
    fit_black_box,
    split_train,
)
from bbshift.pipeline.experiment import (
    COLUMNS,
    ExperimentConfig,
    ExperimentKind,
    IdxSource,
    SyntheticSource,
    loglog_slope,
    run_experiment,
    run_replication,
    summarize_experiment,
)

__all__ = [
    "COLUMNS",
    "CorrectionConfig",
    "CorrectionResult",
    "ExperimentConfig",
    "ExperimentKind",
    "IdxSource",
    "RetrainOn",
    "SyntheticSource",
    "bbsc_correct",
    "fit_black_box",
    "loglog_slope",
    "run_experiment",
    "run_replication",
    "summarize_experiment",
    "split_train",
]
