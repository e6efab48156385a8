"""
BBShift Simulation package

This module contains the label-shift simulation protocols used by every
experiment: seeded splittable random streams, knock-out / tweak-one /
Dirichlet shifted marginals, and label-conditional resampling.
"""

from bbshift.simulation.rng import SeededRng
from bbshift.simulation.shifts import (
    ShiftKind,
    ShiftSpec,
    apply_knockout,
    dirichlet_shift,
    true_weights,
    tweak_one,
)
from bbshift.simulation.resample import resample_by_label

__all__ = [
    "SeededRng",
    "ShiftKind",
    "ShiftSpec",
    "apply_knockout",
    "dirichlet_shift",
    "resample_by_label",
    "true_weights",
    "tweak_one",
]
