"""Tests for part-level aggregation."""

import pytest

from sdds_lab.evaluation.aggregate import aggregate_part, aggregate_parts


def test_single_defective_segment_flags_the_part():
    assert aggregate_part("p", [0] * 134 + [1]).verdict
    assert not aggregate_part("p", [0] * 135).verdict


def test_min_count():
    assert not aggregate_part("p", [1, 0, 0], min_count=2).verdict
    assert aggregate_part("p", [1, 1, 0], min_count=2).verdict


def test_parts_are_grouped_in_order_of_first_appearance():
    verdicts = aggregate_parts(["b", "a", "b", "a", "c"], [0, 0, 1, 0, 0])
    assert [(v.part_id, v.verdict) for v in verdicts] == [("b", True), ("a", False), ("c", False)]
    assert verdicts[0].segment_verdicts == [0, 1]


def test_empty_part_is_rejected():
    with pytest.raises(ValueError, match="no segment verdicts"):
        aggregate_part("p", [])


def test_min_count_must_be_positive():
    with pytest.raises(ValueError, match="min_count"):
        aggregate_part("p", [1], min_count=0)


def test_length_mismatch():
    with pytest.raises(ValueError, match="length mismatch"):
        aggregate_parts(["a"], [0, 1])
