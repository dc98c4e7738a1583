"""Tests for configuration loading."""

import json

from sdds_lab.cli.shared import load_corpora_config, load_grid_config
from sdds_lab.models import GridConfig, HeadKind


def test_grid_section(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("grid:\n  seeds: [7, 8]\n  information_values: [segmentation]\n  workers: 2\n")
    config = load_grid_config(path)
    assert config.seeds == [7, 8]
    assert config.information_values == [HeadKind.SEGMENTATION]
    assert config.workers == 2


def test_bare_json_mapping(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text(json.dumps({"scenarios": ["E2"], "train": {"epochs": 3}, "dropout_rate": 0.25}))
    config = load_grid_config(path)
    assert config.scenarios == ["E2"]
    assert config.train.epochs == 3
    assert config.dropout_rate == 0.25


def test_design_feature_overrides(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("grid:\n  design_features:\n    E2:\n      DF12: false\n")
    assert load_grid_config(path).design_features == {"E2": {"DF12": False}}


def test_defaults_without_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert load_grid_config(None) == GridConfig()


def test_default_file_discovery(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / ".sdds.yaml").write_text("grid:\n  seeds: [9]\n")
    assert load_grid_config(None).seeds == [9]


def test_unrelated_file_gives_defaults(tmp_path):
    path = tmp_path / "other.yaml"
    path.write_text("something_else:\n  x: 1\n")
    assert load_grid_config(path) == GridConfig()


def test_corpora_from_grid_config(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("grid:\n  corpora:\n    target:\n      parts: 30\n    generic: null\n")
    config = load_corpora_config(path)
    assert config.target.parts == 30
    assert config.generic is None


def test_corpus_section(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("corpus:\n  balance: false\n  split_ratios: [0.6, 0.2, 0.2]\n")
    config = load_corpora_config(path)
    assert config.balance is False
    assert config.split_ratios == (0.6, 0.2, 0.2)
