"""
BBShift main package

This package estimates, detects and corrects label shift using the outputs of
any black-box classifier. It includes the confusion-matrix moment estimators,
two-sample shift detectors, importance-weighted retraining, label-shift
simulation protocols and an experiment harness.
"""

__version__ = "0.1.0"
