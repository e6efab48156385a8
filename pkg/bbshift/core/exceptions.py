"""
BBShift Exceptions

Error kinds raised by the estimators, detectors, simulators and file readers.
The CLI maps them onto exit codes.
"""


class BBShiftError(Exception):
    """Base class for all BBShift errors."""
    pass


class ConfigError(BBShiftError):
    """Invalid configuration or hyperparameter (for example δ outside (0, 1/k))."""
    pass


class InputDomainError(BBShiftError, ValueError):
    """A value lies outside its allowed domain (label ≥ k, negative weight, NaN feature)."""
    pass


class FormatError(BBShiftError, ValueError):
    """Inconsistent or malformed input (mixed prediction kinds, bad rows, bad IDX header)."""
    pass


class EmptyInputError(BBShiftError, ValueError):
    """An operation received zero examples."""
    pass


class DimensionMismatchError(BBShiftError, ValueError):
    """Objects that must share a label space or feature width do not."""
    pass


class SupportError(BBShiftError):
    """A class that must be represented has no examples."""
    pass


class DegenerateObjectiveError(BBShiftError):
    """Weighted objective with all-zero example weights."""
    pass


class DegenerateKernelError(BBShiftError):
    """RBF bandwidth from the median trick is zero."""
    pass
