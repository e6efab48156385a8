"""
BBShift Detect package

This module contains black box shift detection: Kolmogorov–Smirnov and
chi-square two-sample tests on predicted labels, the ShiftReport decision
record, and the weighted-MMD check of the label-shift assumption.
"""

from bbshift.detect.detector import DetectionMethod, ShiftReport, detect_label_shift, reduce_to_hard
from bbshift.detect.mmd import assumption_check_mmd
from bbshift.detect.two_sample import chi2_two_sample, ks_two_sample

__all__ = [
    "DetectionMethod",
    "ShiftReport",
    "assumption_check_mmd",
    "chi2_two_sample",
    "detect_label_shift",
    "ks_two_sample",
    "reduce_to_hard",
]
