"""Segmentation-mask verdicts and threshold search."""

from typing import Sequence

import numpy as np


def foreground(probabilities: np.ndarray) -> np.ndarray:
    """Foreground-probability plane: the defect-class planes of ``H x W x (K+1)`` summed."""
    return probabilities[..., 1:].sum(axis=-1)


def mask_to_binary(mask: np.ndarray, threshold: float) -> int:
    """1 iff the pixel sum of ``mask`` is strictly above ``threshold``.

    Examples:
        >>> mask_to_binary(np.zeros((4, 4)), 0.5)
        0
        >>> mask_to_binary(np.full((2, 5), 0.9), 5.0)
        1
        >>> mask_to_binary(np.ones((2, 2)), 4.0)
        0
    """
    return int(float(np.sum(mask)) > threshold)


def candidate_thresholds(sums: Sequence[float]) -> np.ndarray:
    """Midpoints between consecutive distinct sums plus one sentinel below and above.

    Examples:
        >>> candidate_thresholds([0.0, 5.0, 100.0]).tolist()
        [-1.0, 2.5, 52.5, 101.0]
    """
    unique = np.unique(np.asarray(sums, dtype=np.float64))
    midpoints = (unique[:-1] + unique[1:]) / 2.0
    return np.concatenate([[unique[0] - 1.0], midpoints, [unique[-1] + 1.0]])


def optimize_threshold(masks: Sequence[np.ndarray], labels: Sequence[int]) -> tuple[float, float]:
    """Accuracy-maximizing threshold on mask sums; ties go to the smallest threshold.

    Args:
        masks: Foreground-probability planes (or precomputed sums)
        labels: Binary labels, one per mask

    Returns:
        (threshold, accuracy)

    Examples:
        >>> masks = [np.array(0.0), np.array(5.0), np.array(100.0)]
        >>> optimize_threshold(masks, [0, 0, 1])
        (52.5, 1.0)
    """
    if len(masks) == 0:
        raise ValueError("threshold search needs at least one mask")
    if len(masks) != len(labels):
        raise ValueError(f"length mismatch: {len(masks)} masks, {len(labels)} labels")
    sums = np.array([float(np.sum(mask)) for mask in masks])
    truth = np.asarray(labels, dtype=np.int64)
    candidates = candidate_thresholds(sums)
    verdicts = sums[None, :] > candidates[:, None]
    accuracies = (verdicts == (truth[None, :] > 0)).mean(axis=1)
    best = int(np.argmax(accuracies))
    return float(candidates[best]), float(accuracies[best])
