"""Random flip / zoom / shift augmentation of segment images and masks."""

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import affine_transform

from sdds_lab.models import AugmentConfig, ImageSample

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10


@dataclass(frozen=True)
class Transform:
    """One sampled augmentation: flips, then zoom about the centre, then shift."""

    horizontal_flip: bool = False
    vertical_flip: bool = False
    zoom: float = 1.0
    shift_rows: int = 0
    shift_cols: int = 0

    @property
    def is_identity(self) -> bool:
        return self == Transform()

    def apply(self, plane: np.ndarray, order: int) -> np.ndarray:
        """Transform a 2-D array; ``order`` 0 is nearest-neighbour (masks), 1 bilinear."""
        out = plane
        if self.horizontal_flip:
            out = out[:, ::-1]
        if self.vertical_flip:
            out = out[::-1, :]
        if self.zoom != 1.0:
            height, width = out.shape
            center = np.array([(height - 1) / 2, (width - 1) / 2])
            out = affine_transform(
                out,
                matrix=np.array([1.0 / self.zoom, 1.0 / self.zoom]),
                offset=center - center / self.zoom,
                order=order,
                mode="nearest",
            )
        if self.shift_rows or self.shift_cols:
            pad = max(abs(self.shift_rows), abs(self.shift_cols))
            padded = np.pad(out, pad, mode="edge")
            height, width = out.shape
            top, left = pad - self.shift_rows, pad - self.shift_cols
            out = padded[top : top + height, left : left + width]
        return np.ascontiguousarray(out)

    def keeps_in_frame(self, mask: np.ndarray) -> bool:
        """Whether every defect pixel of ``mask`` maps to a position inside the frame."""
        rows, cols = np.nonzero(mask)
        height, width = mask.shape
        rows = rows.astype(np.float64)
        cols = cols.astype(np.float64)
        if self.horizontal_flip:
            cols = width - 1 - cols
        if self.vertical_flip:
            rows = height - 1 - rows
        rows = (height - 1) / 2 + (rows - (height - 1) / 2) * self.zoom + self.shift_rows
        cols = (width - 1) / 2 + (cols - (width - 1) / 2) * self.zoom + self.shift_cols
        return bool(
            np.all((rows >= -0.5) & (rows < height - 0.5) & (cols >= -0.5) & (cols < width - 0.5))
        )


def sample_transform(config: AugmentConfig, rng: np.random.Generator) -> Transform:
    shift_rows, shift_cols = rng.integers(-config.shift_range, config.shift_range + 1, size=2)
    return Transform(
        horizontal_flip=bool(rng.random() < config.horizontal_flip_probability),
        vertical_flip=bool(rng.random() < config.vertical_flip_probability),
        zoom=float(rng.uniform(*config.zoom_range)),
        shift_rows=int(shift_rows),
        shift_cols=int(shift_cols),
    )


def apply_transform(sample: ImageSample, transform: Transform) -> ImageSample:
    image = transform.apply(sample.image[..., 0], order=1)[..., None]
    mask = transform.apply(sample.mask, order=0) if sample.mask is not None else None
    return replace(sample, image=np.clip(image, 0.0, 1.0), mask=mask)


def augment(sample: ImageSample, config: AugmentConfig, rng: np.random.Generator) -> ImageSample:
    """Apply one random transform identically to image and mask.

    For defective samples a transform that would push a defect pixel out of
    the frame (or leave the mask empty) is redrawn, up to ten times; after
    that the sample is returned unchanged. The label never changes.

    Args:
        sample: Segment to augment
        config: Flip probabilities, zoom range and shift range
        rng: Generator for the transform parameters

    Returns:
        Augmented copy of ``sample``

    Examples:
        >>> image = np.zeros((4, 4, 1)); image[0, 1, 0] = 1.0
        >>> mask = np.zeros((4, 4), dtype=int); mask[0, 1] = 1
        >>> s = ImageSample(image=image, part_id="p", segment_index=0, label=1, mask=mask)
        >>> flip = AugmentConfig(horizontal_flip_probability=1.0, vertical_flip_probability=0.0,
        ...                      zoom_range=(1.0, 1.0), shift_range=0)
        >>> out = augment(s, flip, np.random.default_rng(0))
        >>> np.nonzero(out.mask)[1].tolist()
        [2]
    """
    check = sample.label > 0 and sample.mask is not None
    for _ in range(MAX_ATTEMPTS):
        transform = sample_transform(config, rng)
        if check and not transform.keeps_in_frame(sample.mask):
            continue
        augmented = apply_transform(sample, transform)
        if check and not np.any(augmented.mask):
            continue
        return augmented
    logger.warning(
        f"Augmentation of {sample.sample_id} rejected {MAX_ATTEMPTS} times; using the original"
    )
    return replace(sample)
