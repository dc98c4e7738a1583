"""Part-level verdicts from segment verdicts."""

from typing import Sequence

from sdds_lab.models import PartVerdict


def aggregate_part(part_id: str, verdicts: Sequence[int], min_count: int = 1) -> PartVerdict:
    """A part is defective iff at least ``min_count`` of its segments are.

    Examples:
        >>> aggregate_part("p", [0] * 135).verdict
        False
        >>> aggregate_part("p", [0] * 134 + [1]).verdict
        True
        >>> aggregate_part("p", [0] * 134 + [1], min_count=2).verdict
        False
    """
    if len(verdicts) == 0:
        raise ValueError(f"part {part_id} has no segment verdicts")
    if min_count < 1:
        raise ValueError("min_count must be at least 1")
    return PartVerdict(part_id=part_id, segment_verdicts=[int(v) for v in verdicts], min_count=min_count)


def aggregate_parts(
    part_ids: Sequence[str], verdicts: Sequence[int], min_count: int = 1
) -> list[PartVerdict]:
    """Group segment verdicts by part id (in order of first appearance) and aggregate."""
    if len(part_ids) != len(verdicts):
        raise ValueError(f"length mismatch: {len(part_ids)} part ids, {len(verdicts)} verdicts")
    grouped: dict[str, list[int]] = {}
    for part_id, verdict in zip(part_ids, verdicts):
        grouped.setdefault(part_id, []).append(int(verdict))
    return [aggregate_part(part_id, values, min_count) for part_id, values in grouped.items()]
