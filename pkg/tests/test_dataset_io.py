"""Tests for dataset directories."""

import json

import numpy as np
import pytest

from sdds_lab.data.dataset_io import (
    MANIFEST_FILE,
    DatasetReadError,
    load_sample,
    load_samples,
    read_dataset,
    stack_samples,
    write_dataset,
)
from sdds_lab.data.generator import generate_corpus
from sdds_lab.models import DatasetManifest, SampleEntry


@pytest.fixture
def corpus(tiny_corpus_config):
    return generate_corpus(tiny_corpus_config.model_copy(update={"parts": 3}))[1]


def test_round_trip(corpus, tmp_path):
    write_dataset(corpus, tmp_path / "ds")
    loaded = read_dataset(tmp_path / "ds")
    assert loaded.samples == corpus.samples
    assert loaded.label_names == corpus.label_names
    for original, read in zip(load_samples(corpus), load_samples(loaded)):
        assert np.max(np.abs(original.image - read.image)) <= 0.5 / 255 + 1e-12
        assert np.array_equal(original.mask, read.mask)
        assert read.label == original.label


def test_subset_of_read_dataset_loads_from_disk(corpus, tmp_path):
    write_dataset(corpus, tmp_path / "ds")
    loaded = read_dataset(tmp_path / "ds")
    subset = loaded.subset(loaded.samples[:2])
    assert subset.root == tmp_path / "ds"
    assert load_sample(subset, subset.samples[1]).segment_index == 1


def test_missing_image_is_reported_with_entry(corpus, tmp_path):
    write_dataset(corpus, tmp_path / "ds")
    (tmp_path / "ds" / corpus.samples[2].image_path).unlink()
    with pytest.raises(DatasetReadError, match=r"entry 2 .*missing file"):
        read_dataset(tmp_path / "ds")


def test_label_outside_declared_set_is_reported(corpus, tmp_path):
    write_dataset(corpus, tmp_path / "ds")
    path = tmp_path / "ds" / MANIFEST_FILE
    raw = json.loads(path.read_text())
    raw["samples"][1]["label"] = 9
    path.write_text(json.dumps(raw))
    with pytest.raises(DatasetReadError, match="entry 1 .*outside declared set"):
        read_dataset(tmp_path / "ds")


def test_non_manifest_json_is_rejected(tmp_path):
    (tmp_path / MANIFEST_FILE).write_text("[1, 2]")
    with pytest.raises(DatasetReadError, match="not a dataset manifest"):
        read_dataset(tmp_path)


def test_missing_manifest_is_rejected(tmp_path):
    with pytest.raises(DatasetReadError, match="cannot read"):
        read_dataset(tmp_path)


def test_entry_without_source_is_an_error():
    manifest = DatasetManifest(
        name="d",
        label_names=["ok"],
        samples=[SampleEntry(image_path="images/a.png", part_id="a", segment_index=0, label=0)],
    )
    with pytest.raises(DatasetReadError, match="no dataset root"):
        load_sample(manifest, manifest.samples[0])


def test_manifest_rejects_duplicate_samples():
    entry = SampleEntry(image_path="a.png", part_id="a", segment_index=0, label=0)
    with pytest.raises(ValueError, match="duplicate"):
        DatasetManifest(name="d", label_names=["ok"], samples=[entry, entry])


def test_stack_samples(corpus):
    images, labels, masks = stack_samples(load_samples(corpus))
    assert images.shape == (12, 16, 16, 1)
    assert labels.shape == (12,)
    assert masks.shape == (12, 16, 16)


def test_stack_samples_rejects_empty_list():
    with pytest.raises(ValueError, match="empty"):
        stack_samples([])
