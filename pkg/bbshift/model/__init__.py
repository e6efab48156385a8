"""
BBShift Model package

This module contains the labeled Dataset type, the bundled black-box
predictor (softmax regression with per-example weights for importance-weighted
ERM) and the synthetic Gaussian-mixture generator used by the experiments.
Any other classifier can be used instead by supplying its predictions.
"""

from bbshift.model.dataset import Dataset
from bbshift.model.softmax import (
    Gradient,
    SoftmaxModel,
    TrainConfig,
    accuracy,
    loss_and_grad,
    predict,
    train_softmax,
)
from bbshift.model.synthetic import gen_gaussian_mixture, separated_means

__all__ = [
    "Dataset",
    "Gradient",
    "SoftmaxModel",
    "TrainConfig",
    "accuracy",
    "gen_gaussian_mixture",
    "loss_and_grad",
    "predict",
    "separated_means",
    "train_softmax",
]
