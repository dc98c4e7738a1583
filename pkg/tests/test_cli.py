"""Tests for CLI commands."""

import pytest
from typer.testing import CliRunner

from sdds_lab.cli import app
from sdds_lab.engine.weights_io import save_weights
from sdds_lab.harness.grid import RESULT_FILE, write_result
from sdds_lab.models import GridResult, HeadKind, HeadSpec, MetricValues, ScenarioSummary, TransferMode
from sdds_lab.networks.builder import build_model, default_model_spec

runner = CliRunner()

TINY_CONFIG = """\
grid:
  scenarios: [E1]
  seeds: [1]
  saliency_samples: 1
  train:
    epochs: 2
    batch_size: 8
    learning_rate: 0.01
    early_stopping:
      patience: 1
  corpora:
    target:
      parts: 12
      segment_count: 4
      segment_size: 16
      defect_size_range: [4, 6]
      defects_per_part: [1, 1]
      seed: 5
    industrial: null
    generic:
      samples_per_family: 4
      image_size: 16
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "grid.yaml"
    path.write_text(TINY_CONFIG)
    return path


@pytest.fixture
def data_dir(tmp_path, config_file):
    """Corpora written by the generate command."""
    out = tmp_path / "data"
    result = runner.invoke(app, ["generate", "--config", str(config_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    return out


def test_cli_help():
    """Test CLI help command."""
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    assert "Surface defect detection strategy lab" in result.output
    for command in ("generate", "train", "grid", "report", "explain"):
        assert command in result.output


def test_generate_writes_corpora(data_dir):
    assert (data_dir / "target" / "manifest.json").exists()
    assert (data_dir / "generic" / "manifest.json").exists()
    assert not (data_dir / "industrial").exists()


def test_generate_seed_override(tmp_path, config_file):
    result = runner.invoke(
        app, ["generate", "--config", str(config_file), "--out", str(tmp_path / "d"), "--seed", "42"]
    )
    assert result.exit_code == 0, result.output
    assert "with seed 42" in result.output
    assert "target: 48 images" in result.output


def test_train_command(tmp_path, config_file, data_dir):
    out = tmp_path / "runs"
    result = runner.invoke(
        app,
        ["train", "--scenario", "e1", "--data", str(data_dir), "--seed", "1", "--out", str(out), "--config", str(config_file)],
    )
    assert result.exit_code == 0, result.output
    assert "segment: accuracy=" in result.output
    assert "part: accuracy=" in result.output
    assert (out / "runs" / "E1-seed1.sdw").exists()


def test_train_rejects_unknown_scenario(config_file, data_dir):
    result = runner.invoke(
        app, ["train", "--scenario", "E9", "--data", str(data_dir), "--config", str(config_file)]
    )
    assert result.exit_code == 1
    assert "unknown experiment 'E9'" in result.output


def test_train_reports_failed_scenario(tmp_path, config_file, data_dir):
    """E3 needs the industrial corpus, which this config disables."""
    result = runner.invoke(
        app,
        ["train", "-e", "E3", "-d", str(data_dir), "-o", str(tmp_path / "r"), "--config", str(config_file)],
    )
    assert result.exit_code == 1
    assert "Scenario E3 failed" in result.output


def test_grid_command(tmp_path, config_file, data_dir):
    out = tmp_path / "results"
    result = runner.invoke(
        app, ["grid", "--config", str(config_file), "--data", str(data_dir), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "Exp  Output" in result.output
    assert (out / RESULT_FILE).exists()


def test_grid_exit_code_names_failed_scenario(tmp_path, config_file, data_dir, mocker):
    mocker.patch("sdds_lab.harness.runner.pretrain_then_finetune", side_effect=RuntimeError("boom"))
    result = runner.invoke(
        app, ["grid", "--config", str(config_file), "--data", str(data_dir), "--out", str(tmp_path / "r")]
    )
    assert result.exit_code == 1
    assert "Failed scenarios: E1 (seed 1)" in result.output
    assert "RuntimeError: boom" in result.output


@pytest.fixture
def result_dir(tmp_path):
    summary = ScenarioSummary(
        experiment_id="E1",
        information_value=HeadKind.BINARY,
        knowledge_transfer=TransferMode.NONE,
        mean=MetricValues(accuracy=0.9, precision=0.8, recall=0.7, f1=0.75),
        spread=MetricValues(),
        mean_binary_f1=0.75,
        seeds=[1],
    )
    write_result(GridResult(summaries=[summary]), tmp_path)
    return tmp_path


def test_report_table(result_dir):
    result = runner.invoke(app, ["report", str(result_dir)])
    assert result.exit_code == 0
    assert "0.750 ± 0.000" in result.output


def test_report_csv(result_dir):
    result = runner.invoke(app, ["report", str(result_dir / RESULT_FILE), "--format", "csv"])
    assert result.exit_code == 0
    assert result.output.startswith("experiment_id,information_value")
    assert "E1,binary,none,0.9," in result.output


def test_report_rejects_unknown_format(result_dir):
    result = runner.invoke(app, ["report", str(result_dir), "--format", "html"])
    assert result.exit_code == 1
    assert "unknown format 'html'" in result.output


def test_report_missing_results(tmp_path):
    result = runner.invoke(app, ["report", str(tmp_path / "nowhere")])
    assert result.exit_code == 1
    assert "Error" in result.output


def test_report_empty_results(tmp_path):
    write_result(GridResult(), tmp_path)
    result = runner.invoke(app, ["report", str(tmp_path)])
    assert result.exit_code == 1
    assert "nonempty results required" in result.output


def test_explain_command(tmp_path, data_dir):
    spec = default_model_spec(HeadSpec(kind=HeadKind.BINARY), input_shape=(16, 16, 1))
    weights = save_weights(build_model(spec, 0), tmp_path / "model.sdw")
    out = tmp_path / "saliency"
    result = runner.invoke(
        app, ["explain", "--weights", str(weights), "--data", str(data_dir), "--out", str(out), "-n", "2"]
    )
    assert result.exit_code == 0, result.output
    assert "focus ratio" in result.output
    assert (out / "panel.png").exists()
    assert len(list(out.glob("target-*.png"))) == 2


def test_explain_missing_weights(tmp_path, data_dir):
    result = runner.invoke(
        app, ["explain", "-w", str(tmp_path / "none.sdw"), "-d", str(data_dir), "-o", str(tmp_path / "s")]
    )
    assert result.exit_code == 1
    assert "cannot read weight file" in result.output
