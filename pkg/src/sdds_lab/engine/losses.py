"""Loss functions over predicted probabilities.

Predictions are clamped to ``[EPS, 1 - EPS]`` before the logarithm; the
returned gradient is the exact derivative of the clamped loss, so it is zero
wherever the clamp is active.
"""

import numpy as np

from sdds_lab.engine.errors import NonFiniteError, ShapeMismatchError
from sdds_lab.models import HeadKind, LossKind, LossResult

EPS = 1e-12


def _validate(predictions: np.ndarray, targets: np.ndarray) -> None:
    if predictions.shape != targets.shape:
        raise ShapeMismatchError(
            f"predictions {predictions.shape} and targets {targets.shape} differ in shape"
        )
    if predictions.size == 0:
        raise ShapeMismatchError("loss needs at least one prediction")
    if not np.all((targets == 0.0) | (targets == 1.0)):
        raise ValueError("targets must be one-hot or in {0, 1}")
    if not np.all(np.isfinite(predictions)):
        raise NonFiniteError("non-finite predictions passed to loss")


def loss(kind: LossKind, predictions: np.ndarray, targets: np.ndarray) -> LossResult:
    """Mean loss and its gradient with respect to ``predictions``.

    Args:
        kind: ``bce`` for ``N x 1`` sigmoid outputs, ``ce`` for ``N x K`` softmax
            outputs, ``pixelwise_ce`` for ``N x H x W x K`` per-pixel softmax outputs
        predictions: Probabilities
        targets: Same-shape ``{0, 1}`` targets (one-hot for ``ce`` kinds)

    Returns:
        LossResult with the mean over samples (and pixels) and its gradient

    Examples:
        >>> round(loss(LossKind.BCE, np.array([[0.5]]), np.array([[1.0]])).value, 6)
        0.693147
        >>> round(loss(LossKind.CE, np.array([[0.0, 1.0]]), np.array([[0.0, 1.0]])).value, 9)
        0.0
        >>> uniform = np.full((1, 2, 2, 2), 0.5)
        >>> mask = np.zeros((1, 2, 2, 2)); mask[..., 0] = 1.0
        >>> round(loss(LossKind.PIXELWISE_CE, uniform, mask).value, 6)
        0.693147
    """
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    _validate(p, y)
    inside = (p >= EPS) & (p <= 1.0 - EPS)
    clamped = np.clip(p, EPS, 1.0 - EPS)

    if kind == LossKind.BCE:
        count = p.size
        value = -np.sum(y * np.log(clamped) + (1.0 - y) * np.log(1.0 - clamped)) / count
        grad = -(y / clamped - (1.0 - y) / (1.0 - clamped)) / count
    elif kind in (LossKind.CE, LossKind.PIXELWISE_CE):
        if kind == LossKind.CE and p.ndim != 2:
            raise ShapeMismatchError(f"ce expects N x K predictions, got {p.shape}")
        if kind == LossKind.PIXELWISE_CE and p.ndim != 4:
            raise ShapeMismatchError(f"pixelwise_ce expects N x H x W x K predictions, got {p.shape}")
        count = int(np.prod(p.shape[:-1]))
        value = -np.sum(y * np.log(clamped)) / count
        grad = -(y / clamped) / count
    else:
        raise ValueError(f"Unknown loss kind: {kind}")

    return LossResult(value=float(value), grad=np.where(inside, grad, 0.0))


def loss_for_head(head_kind: HeadKind) -> LossKind:
    """Loss matching a head kind.

    Examples:
        >>> loss_for_head(HeadKind.SEGMENTATION).value
        'pixelwise_ce'
    """
    return {
        HeadKind.BINARY: LossKind.BCE,
        HeadKind.MULTICLASS: LossKind.CE,
        HeadKind.SEGMENTATION: LossKind.PIXELWISE_CE,
    }[HeadKind(head_kind)]


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    """One-hot encode integer labels along a new last axis.

    Examples:
        >>> one_hot(np.array([0, 2]), 3).tolist()
        [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise ValueError(f"labels outside [0, {num_classes})")
    return np.eye(num_classes)[labels]
