"""8-bit grayscale rendering of saliency maps and comparison panels."""

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from sdds_lab.models import SaliencyMap

logger = logging.getLogger(__name__)

PANEL_GAP = 2


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to 8-bit gray levels.

    Examples:
        >>> to_uint8(np.array([0.0, 0.5, 1.0, 1.2])).tolist()
        [0, 128, 255, 255]
    """
    return np.round(np.clip(values, 0.0, 1.0) * 255).astype(np.uint8)


def save_saliency(smap: SaliencyMap, path: Path) -> Path:
    """Write the max-normalized map as a grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(smap.normalized())).save(path)
    return path


def load_saliency(path: Path, sample_id: str = "", target_class: int = 1) -> SaliencyMap:
    """Read a map written by ``save_saliency``; values come back in [0, 1]."""
    with Image.open(path) as img:
        values = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
    return SaliencyMap(values=values, sample_id=sample_id, target_class=target_class)


def panel_array(
    inputs: Sequence[np.ndarray],
    columns: Sequence[Sequence[SaliencyMap]],
    gap: int = PANEL_GAP,
) -> np.ndarray:
    """Tile one row per sample: the input image followed by one map per column.

    Args:
        inputs: ``H x W`` or ``H x W x 1`` images in [0, 1]
        columns: Saliency maps per model, each aligned with ``inputs``
        gap: White pixels between tiles

    Examples:
        >>> img = np.zeros((4, 4))
        >>> panel_array([img, img], [[SaliencyMap(values=np.ones((4, 4)))] * 2]).shape
        (10, 10)
    """
    if not inputs:
        raise ValueError("panel needs at least one sample")
    for maps in columns:
        if len(maps) != len(inputs):
            raise ValueError(f"column has {len(maps)} maps for {len(inputs)} samples")
    height, width = np.asarray(inputs[0]).shape[:2]
    n_cols = 1 + len(columns)
    panel = np.ones(
        (len(inputs) * (height + gap) - gap, n_cols * (width + gap) - gap), dtype=np.float64
    )
    for row, image in enumerate(inputs):
        tiles = [np.asarray(image, dtype=np.float64).reshape(height, width)]
        tiles += [maps[row].normalized() for maps in columns]
        top = row * (height + gap)
        for col, tile in enumerate(tiles):
            left = col * (width + gap)
            panel[top : top + height, left : left + width] = tile
    return panel


def render_panel(
    inputs: Sequence[np.ndarray],
    columns: Sequence[Sequence[SaliencyMap]],
    path: Path,
    gap: int = PANEL_GAP,
) -> Path:
    """Write ``panel_array`` as a grayscale PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(panel_array(inputs, columns, gap))).save(path)
    logger.info(f"Wrote saliency panel {path} ({len(inputs)} samples, {len(columns)} models)")
    return path
