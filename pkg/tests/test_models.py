"""Tests for data models and their validators."""

import numpy as np
import pytest
from pydantic import ValidationError

from sdds_lab.models import (
    ConvBlockSpec,
    CorporaConfig,
    CorpusConfig,
    DatasetManifest,
    DomainTranslator,
    HeadKind,
    HeadSpec,
    LayerKind,
    LayerSpec,
    ModelSpec,
    Parameter,
    Scenario,
    TextureCorpusConfig,
    TrainHistory,
    TransferMode,
    TranslatorKind,
)

FLAGS_E1 = {f"DF{i}": bit == "1" for i, bit in enumerate("111110000110", start=1)}


def _segmentation_spec(**kwargs):
    defaults = dict(
        backbone=[ConvBlockSpec(channels=4), ConvBlockSpec(channels=4)],
        head=HeadSpec(kind=HeadKind.SEGMENTATION, num_classes=1),
        input_shape=(16, 16, 1),
    )
    return ModelSpec(**{**defaults, **kwargs})


def test_segmentation_spec_is_valid():
    assert _segmentation_spec().pool_count == 2


@pytest.mark.parametrize(
    "kwargs,message",
    [
        ({"backbone": [ConvBlockSpec(channels=4, pooling=False)]}, "pooled block"),
        ({"backbone": [ConvBlockSpec(channels=4, stride=2)]}, "stride 1"),
        ({"input_shape": (18, 16, 1)}, "not divisible by 4"),
    ],
)
def test_segmentation_spec_rejects_bad_geometry(kwargs, message):
    with pytest.raises(ValidationError, match=message):
        _segmentation_spec(**kwargs)


def test_classifier_spec_allows_odd_sizes():
    spec = ModelSpec(
        backbone=[ConvBlockSpec(channels=2, stride=2)],
        head=HeadSpec(kind=HeadKind.BINARY),
        input_shape=(15, 13, 1),
    )
    assert spec.pool_count == 1


@pytest.mark.parametrize(
    "kind,num_classes,message",
    [(HeadKind.BINARY, 2, "exactly one"), (HeadKind.MULTICLASS, 1, "at least two")],
)
def test_head_class_counts(kind, num_classes, message):
    with pytest.raises(ValidationError, match=message):
        HeadSpec(kind=kind, num_classes=num_classes)


def test_layer_spec_requires_channels_and_skip_source():
    with pytest.raises(ValidationError, match="in/out channels"):
        LayerSpec(name="c", kind=LayerKind.CONV2D)
    with pytest.raises(ValidationError, match="skip_from"):
        LayerSpec(name="cat", kind=LayerKind.CONCAT_SKIP)


def test_parameter_is_contiguous_float64():
    p = Parameter(np.arange(6, dtype=np.int32).reshape(2, 3).T)
    assert p.value.dtype == np.float64
    assert p.value.flags["C_CONTIGUOUS"]
    assert p.shape == (3, 2)


def test_translator_validation():
    uniform = list(np.linspace(1 / 256, 1.0, 256))
    assert DomainTranslator(kind=TranslatorKind.HISTOGRAM_MATCH, reference_cdf=uniform)
    with pytest.raises(ValidationError, match="needs a reference"):
        DomainTranslator(kind=TranslatorKind.HISTOGRAM_MATCH)
    with pytest.raises(ValidationError, match="256 bins"):
        DomainTranslator(reference_cdf=[0.5, 1.0])
    with pytest.raises(ValidationError, match="non-decreasing"):
        DomainTranslator(reference_cdf=uniform[::-1])


def test_train_history_checks_columns():
    with pytest.raises(ValidationError, match="different lengths"):
        TrainHistory(train_loss=[1.0], val_loss=[1.0, 0.9], val_f1=[0.5])
    with pytest.raises(ValidationError, match="best epoch"):
        TrainHistory(stopped_epoch=2, best_epoch=3)


def test_train_history_record_advances_stop_epoch():
    history = TrainHistory()
    history.record(0.9, 0.8, 0.5)
    history.record(0.7, 0.6, 0.6)
    assert history.epochs == history.stopped_epoch == 2


def test_corpora_config_requires_one_image_size():
    with pytest.raises(ValidationError, match="one image size"):
        CorporaConfig(
            target=CorpusConfig(segment_size=32, defect_size_range=(4, 8)),
            industrial=None,
            generic=TextureCorpusConfig(image_size=64),
        )


def test_corpora_config_checks_ratios():
    with pytest.raises(ValidationError, match="sum to 1"):
        CorporaConfig(split_ratios=(0.5, 0.3, 0.3))


def test_corpus_config_checks_defect_sizes():
    with pytest.raises(ValidationError, match="defect sizes"):
        CorpusConfig(segment_size=16, defect_size_range=(4, 16))


def test_scenario_accepts_matching_flags():
    scenario = Scenario(
        experiment_id="E1",
        information_value=HeadKind.BINARY,
        knowledge_transfer=TransferMode.NONE,
        design_features=FLAGS_E1,
    )
    assert scenario.enabled("DF10") and not scenario.uses_translation


@pytest.mark.parametrize(
    "changes,transfer,message",
    [
        ({"DF5": False}, TransferMode.NONE, "DF5 must be set"),
        ({"DF8": True}, TransferMode.NONE, "DF8/DF9"),
        ({}, TransferMode.GENERIC, "DF8/DF9"),
        ({"DF1": False}, TransferMode.NONE, "DF1 cannot be disabled"),
        ({"DF2": False, "DF3": False}, TransferMode.NONE, "DF2, DF3 cannot be disabled"),
        ({"DF7": True}, TransferMode.NONE, "DF7 conflict with the DF5 head"),
        ({"DF8": True, "DF9": True}, TransferMode.INDUSTRIAL, "mutually exclusive"),
        ({"DF9": True}, TransferMode.GENERIC, "industrial corpus"),
    ],
)
def test_scenario_rejects_inconsistent_flags(changes, transfer, message):
    with pytest.raises(ValidationError, match=message):
        Scenario(
            experiment_id="E1",
            information_value=HeadKind.BINARY,
            knowledge_transfer=transfer,
            design_features={**FLAGS_E1, **changes},
        )


def test_scenario_requires_all_twelve_flags():
    flags = dict(FLAGS_E1)
    del flags["DF12"]
    with pytest.raises(ValidationError, match="DF1..DF12"):
        Scenario(
            experiment_id="E1",
            information_value=HeadKind.BINARY,
            knowledge_transfer=TransferMode.NONE,
            design_features=flags,
        )


def test_manifest_counts_and_parts():
    manifest = DatasetManifest.model_validate(
        {
            "name": "d",
            "label_names": ["ok", "nonfill"],
            "samples": [
                {"image_path": "a0.png", "part_id": "a", "segment_index": 0, "label": 0},
                {"image_path": "a1.png", "part_id": "a", "segment_index": 1, "label": 1},
                {"image_path": "b0.png", "part_id": "b", "segment_index": 0, "label": 0},
            ],
        }
    )
    assert manifest.num_classes == 2
    assert manifest.label_counts() == {0: 2, 1: 1}
    assert manifest.part_ids() == ["a", "b"]
