"""Tests for gradient saliency, focus ratios and rendering."""

import numpy as np
import pytest

from sdds_lab.engine.init import init_weights
from sdds_lab.explain.render import load_saliency, panel_array, render_panel, save_saliency
from sdds_lab.explain.saliency import (
    FOCUS_CAP,
    class_score,
    saliency,
    saliency_focus_score,
)
from sdds_lab.models import HeadKind, HeadSpec, ModelSpec, SaliencyMap

from tests.conftest import numerical_gradient, relative_error


def test_linear_model_saliency_is_weight_magnitude():
    """Without a backbone the score is w . mean(x) + b, so every pixel gets |w_c| / (H * W)."""
    spec = ModelSpec(head=HeadSpec(kind=HeadKind.BINARY), input_shape=(4, 4, 2), dropout_rate=0.0)
    state = init_weights(spec, 0)
    state.params["head.dense.weight"].value[:] = [[0.8], [-1.6]]
    smap = saliency(state, np.random.default_rng(0).random((4, 4, 2)))
    np.testing.assert_allclose(smap.values, np.full((4, 4), 1.6 / 16))


@pytest.mark.parametrize("target_class", [0, 1])
def test_saliency_matches_finite_differences(tiny_spec, target_class):
    state = init_weights(tiny_spec, 3)
    image = np.random.default_rng(1).random((8, 8, 1))
    numeric = numerical_gradient(lambda x: class_score(state, x, target_class), image.copy())
    smap = saliency(state, image, target_class)
    assert relative_error(smap.values, np.abs(numeric[..., 0])) < 1e-4


def test_segmentation_saliency_matches_finite_differences(tiny_segmentation_spec):
    state = init_weights(tiny_segmentation_spec, 2)
    image = np.random.default_rng(2).random((8, 8, 1))
    numeric = numerical_gradient(lambda x: class_score(state, x, 2), image.copy())
    assert relative_error(saliency(state, image, 2).values, np.abs(numeric[..., 0])) < 1e-4


def test_binary_classes_share_magnitude(tiny_spec):
    state = init_weights(tiny_spec, 0)
    image = np.random.default_rng(0).random((8, 8, 1))
    assert np.array_equal(saliency(state, image, 0).values, saliency(state, image, 1).values)


def test_saliency_leaves_model_untouched(tiny_spec):
    state = init_weights(tiny_spec, 0)
    saliency(state, np.random.default_rng(0).random((8, 8, 1)))
    assert state.tape is None
    assert all(p.grad is None for p in state.params.values())


def test_invalid_class_is_rejected(tiny_spec):
    with pytest.raises(ValueError, match="invalid class 2"):
        saliency(init_weights(tiny_spec, 0), np.zeros((8, 8, 1)), target_class=2)


@pytest.fixture
def corner_mask():
    mask = np.zeros((2, 2), dtype=int)
    mask[0, 0] = 1
    return mask


def test_uniform_map_scores_one(corner_mask):
    assert saliency_focus_score(SaliencyMap(values=np.full((2, 2), 0.3)), corner_mask) == 1.0


def test_concentrated_map_scores_ratio(corner_mask):
    values = np.array([[0.8, 0.2], [0.2, 0.2]])
    assert saliency_focus_score(SaliencyMap(values=values), corner_mask) == pytest.approx(4.0)


def test_zero_map_scores_one(corner_mask):
    assert saliency_focus_score(SaliencyMap(values=np.zeros((2, 2))), corner_mask) == 1.0


def test_no_saliency_outside_is_capped(corner_mask):
    values = np.array([[0.5, 0.0], [0.0, 0.0]])
    assert saliency_focus_score(SaliencyMap(values=values), corner_mask) == FOCUS_CAP
    assert saliency_focus_score(SaliencyMap(values=np.ones((2, 2))), np.ones((2, 2))) == FOCUS_CAP


def test_empty_mask_is_rejected():
    with pytest.raises(ValueError, match="nonempty"):
        saliency_focus_score(SaliencyMap(values=np.ones((2, 2))), np.zeros((2, 2)))


def test_mask_shape_must_match():
    with pytest.raises(ValueError, match="does not match"):
        saliency_focus_score(SaliencyMap(values=np.ones((2, 2))), np.ones((3, 3)))


def test_png_round_trip_within_one_gray_level(tmp_path):
    smap = SaliencyMap(values=np.random.default_rng(0).random((8, 8)) * 3.0, sample_id="s")
    loaded = load_saliency(save_saliency(smap, tmp_path / "s.png"), sample_id="s")
    assert np.max(np.abs(loaded.values - smap.normalized())) <= 1 / 255
    assert loaded.sample_id == "s"


def test_panel_layout():
    image = np.zeros((4, 4, 1))
    maps = [SaliencyMap(values=np.ones((4, 4)))] * 3
    panel = panel_array([image] * 3, [maps, maps])
    assert panel.shape == (3 * 4 + 2 * 2, 3 * 4 + 2 * 2)
    assert np.all(panel[:4, :4] == 0.0)
    assert np.all(panel[:4, 4:6] == 1.0)
    assert np.all(panel[:4, 6:10] == 1.0)


def test_panel_rejects_misaligned_columns():
    with pytest.raises(ValueError, match="2 maps for 1 samples"):
        panel_array([np.zeros((4, 4))], [[SaliencyMap(values=np.ones((4, 4)))] * 2])


def test_render_panel_writes_png(tmp_path):
    path = render_panel([np.zeros((4, 4))], [[SaliencyMap(values=np.ones((4, 4)))]], tmp_path / "p" / "panel.png")
    assert path.exists()


@pytest.mark.parametrize("scale", [0.25, 3.0, 40.0])
def test_focus_ratio_ignores_logit_scale(tiny_spec, scale):
    state = init_weights(tiny_spec, 5)
    image = np.random.default_rng(5).random((8, 8, 1))
    mask = np.zeros((8, 8), dtype=np.int64)
    mask[2:5, 3:6] = 1
    before = saliency_focus_score(saliency(state, image), mask)
    state.params["head.dense.weight"].value *= scale
    state.params["head.dense.bias"].value *= scale
    assert saliency_focus_score(saliency(state, image), mask) == pytest.approx(before, rel=1e-9)
