"""Deterministic float64 tensor engine: layers, autodiff, losses and optimizers."""

from sdds_lab.engine.errors import (
    BackwardBeforeForwardError,
    MissingGradientError,
    NonFiniteError,
    ShapeMismatchError,
    WeightFileError,
)
from sdds_lab.engine.init import init_weights
from sdds_lab.engine.losses import loss
from sdds_lab.engine.network import backward, forward, predict
from sdds_lab.engine.optim import OptimizerState, step
from sdds_lab.engine.weights_io import load_weights, save_weights

__all__ = [
    "BackwardBeforeForwardError",
    "MissingGradientError",
    "NonFiniteError",
    "OptimizerState",
    "ShapeMismatchError",
    "WeightFileError",
    "backward",
    "forward",
    "init_weights",
    "load_weights",
    "loss",
    "predict",
    "save_weights",
    "step",
]
