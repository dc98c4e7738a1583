"""Tests for image / mask augmentation."""

import logging

import numpy as np
import pytest

from sdds_lab.data.augment import Transform, augment
from sdds_lab.models import AugmentConfig, ImageSample

IDENTITY = AugmentConfig(
    horizontal_flip_probability=0.0,
    vertical_flip_probability=0.0,
    zoom_range=(1.0, 1.0),
    shift_range=0,
)


@pytest.fixture
def defective_sample():
    rng = np.random.default_rng(0)
    mask = np.zeros((16, 16), dtype=np.int64)
    mask[6:9, 7:10] = 2
    image = rng.random((16, 16, 1)) * 0.5
    image[mask > 0] = 0.9
    return ImageSample(image=image, part_id="p", segment_index=0, label=2, mask=mask)


def test_identity_config_leaves_sample_unchanged(defective_sample):
    out = augment(defective_sample, IDENTITY, np.random.default_rng(0))
    assert np.array_equal(out.image, defective_sample.image)
    assert np.array_equal(out.mask, defective_sample.mask)


@pytest.mark.parametrize("seed", range(20))
def test_defects_stay_in_frame_and_label_is_kept(defective_sample, seed):
    config = AugmentConfig(zoom_range=(0.8, 1.2), shift_range=4)
    out = augment(defective_sample, config, np.random.default_rng(seed))
    assert out.label == 2
    assert out.image.shape == (16, 16, 1)
    assert np.any(out.mask)
    assert set(np.unique(out.mask).tolist()) <= {0, 2}
    assert 0.0 <= out.image.min() and out.image.max() <= 1.0


def test_image_and_mask_get_the_same_transform(defective_sample):
    transform = Transform(horizontal_flip=True, shift_rows=2, shift_cols=-1)
    image = transform.apply(defective_sample.image[..., 0], order=1)
    mask = transform.apply(defective_sample.mask, order=0)
    assert np.all(image[mask > 0] == 0.9)


def test_flips():
    plane = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(Transform(horizontal_flip=True).apply(plane, order=1), np.fliplr(plane))
    assert np.array_equal(Transform(vertical_flip=True).apply(plane, order=1), np.flipud(plane))


def test_shift_moves_content():
    plane = np.zeros((5, 5))
    plane[2, 2] = 1.0
    shifted = Transform(shift_rows=1, shift_cols=-2).apply(plane, order=0)
    assert np.argwhere(shifted == 1.0).tolist() == [[3, 0]]


def test_transform_that_loses_the_defect_falls_back_to_original(caplog):
    mask = np.zeros((16, 16), dtype=np.int64)
    mask[0, 0] = 1
    sample = ImageSample(image=np.zeros((16, 16, 1)), part_id="p", segment_index=0, label=1, mask=mask)
    zoom_out_of_frame = IDENTITY.model_copy(update={"zoom_range": (1.5, 1.5)})
    with caplog.at_level(logging.WARNING):
        out = augment(sample, zoom_out_of_frame, np.random.default_rng(0))
    assert np.array_equal(out.mask, mask)
    assert "rejected" in caplog.text


def test_non_defective_samples_are_always_transformed():
    sample = ImageSample(image=np.eye(4)[..., None], part_id="p", segment_index=0, label=0, mask=np.zeros((4, 4), int))
    flip = IDENTITY.model_copy(update={"horizontal_flip_probability": 1.0})
    out = augment(sample, flip, np.random.default_rng(0))
    assert np.array_equal(out.image[..., 0], np.fliplr(np.eye(4)))
