"""Tests for mask thresholding and the threshold search."""

import numpy as np
import pytest

from sdds_lab.evaluation.thresholds import (
    candidate_thresholds,
    foreground,
    mask_to_binary,
    optimize_threshold,
)


def sweep(sums, labels):
    """Best accuracy and smallest threshold reaching it, over every distinct cut."""
    unique = sorted(set(sums))
    cuts = [unique[0] - 1.0] + unique
    best_accuracy, best_cut = -1.0, 0
    for k, t in enumerate(cuts):
        accuracy = sum(1 for s, y in zip(sums, labels) if (s > t) == (y == 1)) / len(sums)
        if accuracy > best_accuracy:
            best_accuracy, best_cut = accuracy, k
    if best_cut == 0:
        threshold = unique[0] - 1.0
    elif best_cut == len(unique):
        threshold = unique[-1] + 1.0
    else:
        threshold = (unique[best_cut - 1] + unique[best_cut]) / 2.0
    return threshold, best_accuracy


@pytest.mark.parametrize("seed", range(200))
def test_search_matches_exhaustive_sweep(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 30))
    sums = rng.integers(0, 12, size=n).astype(float).tolist()
    labels = rng.integers(0, 2, size=n).tolist()
    threshold, accuracy = optimize_threshold([np.array(s) for s in sums], labels)
    assert (threshold, accuracy) == sweep(sums, labels)


def test_separable_sums_reach_full_accuracy():
    masks = [np.full((4, 4), v) for v in (0.0, 0.01, 0.5, 0.9)]
    threshold, accuracy = optimize_threshold(masks, [0, 0, 1, 1])
    assert accuracy == 1.0
    assert threshold == pytest.approx((0.16 + 8.0) / 2)


def test_all_negative_labels_choose_top_sentinel():
    assert optimize_threshold([np.array(1.0), np.array(2.0)], [0, 0]) == (3.0, 1.0)


def test_all_positive_labels_choose_bottom_sentinel():
    assert optimize_threshold([np.array(1.0), np.array(2.0)], [1, 1]) == (0.0, 1.0)


def test_single_sum_has_two_sentinels():
    assert candidate_thresholds([4.0, 4.0]).tolist() == [3.0, 5.0]


def test_search_rejects_bad_input():
    with pytest.raises(ValueError, match="at least one"):
        optimize_threshold([], [])
    with pytest.raises(ValueError, match="length mismatch"):
        optimize_threshold([np.zeros(2)], [0, 1])


def test_mask_verdict_is_strict():
    assert mask_to_binary(np.ones((2, 2)), 3.999) == 1
    assert mask_to_binary(np.ones((2, 2)), 4.0) == 0


def test_foreground_sums_defect_planes():
    probabilities = np.zeros((2, 2, 3))
    probabilities[..., 0] = 0.5
    probabilities[..., 1] = 0.2
    probabilities[..., 2] = 0.3
    np.testing.assert_allclose(foreground(probabilities), np.full((2, 2), 0.5))


@pytest.mark.parametrize("seed", range(20))
def test_raising_the_threshold_never_turns_a_verdict_positive(seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((6, 6)) * rng.integers(0, 2, size=(6, 6))
    thresholds = np.sort(rng.uniform(-1.0, 40.0, size=30))
    verdicts = [mask_to_binary(mask, t) for t in thresholds]
    assert verdicts == sorted(verdicts, reverse=True)


def test_verdict_at_its_own_sum_is_negative():
    mask = np.full((2, 2), 0.25)
    assert mask_to_binary(mask, 0.999) == 1
    assert mask_to_binary(mask, 1.0) == 0
