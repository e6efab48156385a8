"""
BBShift IO package

This module contains the file formats: prediction and dataset CSV files, the
IDX image/label reader and writer, report documents, model parameter files
and experiment result tables.
"""

from bbshift.io.datasets import load_dataset_csv, load_features_csv, save_dataset, save_dataset_csv
from bbshift.io.idx import load_idx, read_idx_images, read_idx_labels, save_idx
from bbshift.io.models import load_model, save_model
from bbshift.io.predictions import load_predictions, save_predictions
from bbshift.io.report import (
    CorrectionSection,
    DetectionSection,
    MetaSection,
    ReportDocument,
    WeightsSection,
    read_report,
    write_report,
)
from bbshift.io.tables import read_table, write_table

__all__ = [
    "CorrectionSection",
    "DetectionSection",
    "MetaSection",
    "ReportDocument",
    "WeightsSection",
    "load_dataset_csv",
    "load_features_csv",
    "load_idx",
    "load_model",
    "load_predictions",
    "read_idx_images",
    "read_idx_labels",
    "read_report",
    "read_table",
    "save_dataset",
    "save_dataset_csv",
    "save_idx",
    "save_model",
    "save_predictions",
    "write_report",
    "write_table",
]
