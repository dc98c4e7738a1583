"""Majority undersampling on the defective / non-defective axis."""

import logging

import numpy as np

from sdds_lab.models import DatasetManifest

logger = logging.getLogger(__name__)


class EmptyClassError(ValueError):
    """One side of the balancing axis has no samples."""


def balance_undersample(manifest: DatasetManifest, seed: int) -> DatasetManifest:
    """Keep every minority sample and an equal-sized random subset of the majority.

    The axis is defective (label > 0) against non-defective (label 0); per-type
    counts inside the defective side are left as they are. Kept samples stay in
    manifest order.

    Args:
        manifest: Dataset to balance
        seed: Selection seed

    Returns:
        Manifest with ``2 * minority`` samples

    Raises:
        EmptyClassError: if either side is empty

    Examples:
        >>> from sdds_lab.models import SampleEntry
        >>> entries = [SampleEntry(image_path=f"{i}.png", part_id=f"p{i}", segment_index=0,
        ...                        label=1 if i < 2 else 0) for i in range(12)]
        >>> m = DatasetManifest(name="d", label_names=["ok", "nonfill"], samples=entries)
        >>> balance_undersample(m, seed=0).label_counts()
        {0: 2, 1: 2}
    """
    defective = [i for i, entry in enumerate(manifest.samples) if entry.label > 0]
    intact = [i for i, entry in enumerate(manifest.samples) if entry.label == 0]
    if not defective or not intact:
        raise EmptyClassError(
            f"{manifest.name}: cannot balance {len(defective)} defective against "
            f"{len(intact)} non-defective samples"
        )
    minority, majority = (defective, intact) if len(defective) <= len(intact) else (intact, defective)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(majority), size=len(minority), replace=False)
    keep = set(minority) | {majority[i] for i in chosen}
    balanced = manifest.subset(
        [entry for i, entry in enumerate(manifest.samples) if i in keep],
        name=manifest.name,
    )
    logger.info(
        f"Balanced '{manifest.name}': {len(manifest.samples)} -> {len(balanced.samples)} samples "
        f"({len(minority)} per side)"
    )
    return balanced
