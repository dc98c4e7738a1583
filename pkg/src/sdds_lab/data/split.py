"""Part-level train / validation / test split."""

import logging

import numpy as np

from sdds_lab.models import DatasetManifest

logger = logging.getLogger(__name__)

SPLIT_NAMES = ("train", "val", "test")


def part_counts(n_parts: int, ratios: tuple[float, float, float]) -> list[int]:
    """Largest-remainder allocation of ``n_parts`` with at least one part per split.

    Examples:
        >>> part_counts(10, (0.8, 0.1, 0.1))
        [8, 1, 1]
        >>> part_counts(3, (0.8, 0.1, 0.1))
        [1, 1, 1]
    """
    if n_parts < len(ratios):
        raise ValueError(f"{n_parts} parts cannot fill {len(ratios)} splits")
    raw = [r * n_parts for r in ratios]
    counts = [int(np.floor(x)) for x in raw]
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[: n_parts - sum(counts)]:
        counts[i] += 1
    for i in range(len(counts)):
        while counts[i] == 0:
            donor = max(range(len(counts)), key=lambda j: (counts[j], -j))
            counts[donor] -= 1
            counts[i] += 1
    return counts


def split_by_part(
    manifest: DatasetManifest, ratios: tuple[float, float, float], seed: int
) -> tuple[DatasetManifest, DatasetManifest, DatasetManifest]:
    """Partition the parts of ``manifest`` into train, validation and test splits.

    All segments of a part land in the same split.

    Args:
        manifest: Dataset to split
        ratios: (train, val, test) fractions, positive and summing to 1
        seed: Shuffle seed

    Returns:
        (train, val, test) manifests

    Examples:
        >>> from sdds_lab.models import SampleEntry
        >>> entries = [SampleEntry(image_path=f"{p}_{s}.png", part_id=f"p{p}", segment_index=s,
        ...                        label=0) for p in range(10) for s in range(2)]
        >>> m = DatasetManifest(name="d", label_names=["ok"], samples=entries)
        >>> [len(s.part_ids()) for s in split_by_part(m, (0.8, 0.1, 0.1), seed=0)]
        [8, 1, 1]
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios {ratios} must be three positive values summing to 1")
    parts = manifest.part_ids()
    counts = part_counts(len(parts), ratios)
    shuffled = [parts[i] for i in np.random.default_rng(seed).permutation(len(parts))]

    assignment: dict[str, int] = {}
    start = 0
    for split_index, count in enumerate(counts):
        for part_id in shuffled[start : start + count]:
            assignment[part_id] = split_index
        start += count

    splits = tuple(
        manifest.subset(
            [entry for entry in manifest.samples if assignment[entry.part_id] == split_index],
            name=f"{manifest.name}-{split_name}",
        )
        for split_index, split_name in enumerate(SPLIT_NAMES)
    )
    logger.info(
        f"Split '{manifest.name}' by part: "
        + ", ".join(f"{name}={count}" for name, count in zip(SPLIT_NAMES, counts))
    )
    return splits[0], splits[1], splits[2]
