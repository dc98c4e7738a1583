"""Dataset directories: ``manifest.json`` plus 8-bit grayscale PNG images and masks.

Images are stored as ``round(v * 255)``; masks store class ids directly.
"""

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image
from pydantic import ValidationError

from sdds_lab.models import DatasetManifest, ImageSample, SampleEntry

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


class DatasetReadError(ValueError):
    """A dataset directory is missing files or has an invalid manifest entry."""


def _read_png(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def load_sample(manifest: DatasetManifest, entry: SampleEntry) -> ImageSample:
    """Resolve one entry from the in-memory cache or from the dataset directory."""
    cached = manifest.cached(entry.key)
    if cached is not None:
        return cached
    root = manifest.root
    if root is None:
        raise DatasetReadError(f"entry {entry.image_path}: no sample in memory and no dataset root")
    try:
        image = _read_png(root / entry.image_path).astype(np.float64) / 255.0
        mask = _read_png(root / entry.mask_path).astype(np.int64) if entry.mask_path else None
    except (OSError, ValueError) as e:
        raise DatasetReadError(f"entry {entry.image_path}: cannot read files: {e}") from e
    sample = ImageSample(
        image=image[..., None],
        part_id=entry.part_id,
        segment_index=entry.segment_index,
        label=entry.label,
        mask=mask,
    )
    manifest.attach({entry.key: sample})
    return sample


def load_samples(manifest: DatasetManifest) -> list[ImageSample]:
    return [load_sample(manifest, entry) for entry in manifest.samples]


def stack_samples(
    samples: list[ImageSample],
) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Batch arrays: images ``N x H x W x 1``, labels ``N``, masks ``N x H x W`` or None.

    Examples:
        >>> s = ImageSample(image=np.zeros((2, 2, 1)), part_id="p", segment_index=0, label=0)
        >>> images, labels, masks = stack_samples([s, s])
        >>> images.shape, labels.tolist(), masks
        ((2, 2, 2, 1), [0, 0], None)
    """
    if not samples:
        raise ValueError("cannot stack an empty sample list")
    images = np.stack([s.image for s in samples]).astype(np.float64)
    labels = np.array([s.label for s in samples], dtype=np.int64)
    if all(s.mask is not None for s in samples):
        masks: Optional[np.ndarray] = np.stack([s.mask for s in samples])  # type: ignore[misc]
    else:
        masks = None
    return images, labels, masks


def write_dataset(manifest: DatasetManifest, directory: Path) -> Path:
    """Write images, masks and ``manifest.json`` below ``directory``.

    Args:
        manifest: Dataset whose samples are in memory or on disk
        directory: Output directory (created if needed)

    Returns:
        Path of the written manifest file
    """
    directory = Path(directory)
    (directory / "images").mkdir(parents=True, exist_ok=True)
    (directory / "masks").mkdir(parents=True, exist_ok=True)
    for entry in manifest.samples:
        sample = load_sample(manifest, entry)
        pixels = np.round(np.clip(sample.image[..., 0], 0.0, 1.0) * 255.0).astype(np.uint8)
        Image.fromarray(pixels).save(directory / entry.image_path)
        if entry.mask_path and sample.mask is not None:
            Image.fromarray(sample.mask.astype(np.uint8)).save(directory / entry.mask_path)
    path = directory / MANIFEST_FILE
    path.write_text(manifest.model_dump_json(indent=2))
    logger.info(f"Wrote dataset '{manifest.name}' ({len(manifest.samples)} samples) to {directory}")
    return path


def read_dataset(directory: Path) -> DatasetManifest:
    """Read a dataset directory written by ``write_dataset``.

    Pixels are loaded lazily; every referenced file must exist.

    Raises:
        DatasetReadError: naming the offending entry when the manifest is
            malformed, a label lies outside the declared set or a file is missing
    """
    directory = Path(directory)
    path = directory / MANIFEST_FILE
    try:
        raw = json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise DatasetReadError(f"cannot read {path}: {e}") from e
    if not isinstance(raw, dict) or "label_names" not in raw:
        raise DatasetReadError(f"{path}: not a dataset manifest")

    label_names = raw["label_names"]
    entries = []
    for index, item in enumerate(raw.get("samples", [])):
        where = item.get("image_path", "?") if isinstance(item, dict) else "?"
        try:
            entry = SampleEntry.model_validate(item)
        except ValidationError as e:
            raise DatasetReadError(f"manifest entry {index} ({where}): {e}") from e
        if entry.label >= len(label_names):
            raise DatasetReadError(
                f"manifest entry {index} ({where}): label {entry.label} outside declared set"
            )
        for relative in (entry.image_path, entry.mask_path):
            if relative and not (directory / relative).is_file():
                raise DatasetReadError(f"manifest entry {index} ({where}): missing file {relative}")
        entries.append(entry)

    try:
        manifest = DatasetManifest.model_validate({**raw, "samples": [e.model_dump() for e in entries]})
    except ValidationError as e:
        raise DatasetReadError(f"{path}: {e}") from e
    manifest.attach({}, root=directory)
    logger.info(f"Read dataset '{manifest.name}' ({len(manifest.samples)} samples) from {directory}")
    return manifest
