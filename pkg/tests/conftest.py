"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from sdds_lab.data.corpora import build_corpora
from sdds_lab.models import (
    AugmentConfig,
    ConvBlockSpec,
    CorporaConfig,
    CorpusConfig,
    EarlyStoppingConfig,
    GridConfig,
    HeadKind,
    HeadSpec,
    ModelSpec,
    TextureCorpusConfig,
    TrainConfig,
)


def numerical_gradient(f, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central finite differences of the scalar function ``f`` at ``x``."""
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        index = it.multi_index
        original = x[index]
        x[index] = original + eps
        plus = f(x)
        x[index] = original - eps
        minus = f(x)
        x[index] = original
        grad[index] = (plus - minus) / (2 * eps)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """Norm-wise relative error ``|a - b| / (|a| + |b|)``; 0 when both are zero."""
    scale = np.linalg.norm(a) + np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / scale) if scale > 0 else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def tiny_spec():
    """Two-block binary classifier over 8x8 grayscale images."""
    return ModelSpec(
        backbone=[ConvBlockSpec(channels=2), ConvBlockSpec(channels=3)],
        head=HeadSpec(kind=HeadKind.BINARY),
        input_shape=(8, 8, 1),
        dropout_rate=0.0,
    )


@pytest.fixture
def tiny_segmentation_spec():
    return ModelSpec(
        backbone=[ConvBlockSpec(channels=2), ConvBlockSpec(channels=3, pooling=False)],
        head=HeadSpec(kind=HeadKind.SEGMENTATION, num_classes=2),
        input_shape=(8, 8, 1),
        dropout_rate=0.0,
    )


@pytest.fixture
def tiny_corpus_config():
    """Small 16x16 target corpus: 12 parts of 4 segments."""
    return CorpusConfig(
        parts=12,
        segment_count=4,
        segment_size=16,
        defect_size_range=(4, 6),
        defects_per_part=(1, 1),
        seed=5,
    )


@pytest.fixture
def tiny_corpora_config(tiny_corpus_config):
    return CorporaConfig(
        target=tiny_corpus_config,
        industrial=tiny_corpus_config.model_copy(
            update={"name": "industrial", "texture_family": "metal", "seed": 11}
        ),
        generic=TextureCorpusConfig(samples_per_family=6, image_size=16, seed=3),
    )


@pytest.fixture
def tiny_corpora(tiny_corpora_config):
    return build_corpora(tiny_corpora_config)


@pytest.fixture
def fast_train_config():
    return TrainConfig(
        epochs=2,
        batch_size=8,
        learning_rate=1e-2,
        early_stopping=EarlyStoppingConfig(patience=1),
    )


@pytest.fixture
def tiny_grid_config(tiny_corpora_config, fast_train_config):
    return GridConfig(
        corpora=tiny_corpora_config,
        seeds=[1],
        train=fast_train_config,
        augmentation=AugmentConfig(shift_range=1),
        saliency_samples=2,
    )
