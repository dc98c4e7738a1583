"""Tests for scenario runs and the grid."""

import json

import numpy as np
import pytest

from sdds_lab.harness import runner
from sdds_lab.harness.grid import (
    RESULT_FILE,
    check_hypotheses,
    read_result,
    run_grid,
    summarize,
)
from sdds_lab.harness.runner import run_scenario, segment_verdicts, source_weights_path
from sdds_lab.harness.scenarios import build_scenario
from sdds_lab.models import (
    GridConfig,
    HeadKind,
    MetricsReport,
    MetricValues,
    ScenarioRun,
    ScenarioSummary,
    TrainHistory,
    TransferMode,
)
from sdds_lab.networks.builder import build_model


def _ok_run(eid, seed, f1, stop=5, ratios=()):
    metrics = MetricsReport(accuracy=f1, precision=f1, recall=f1, f1=f1)
    history = TrainHistory(train_loss=[1.0] * stop, val_loss=[1.0] * stop, val_f1=[0.5] * stop, stopped_epoch=stop)
    return ScenarioRun(
        experiment_id=eid,
        seed=seed,
        report=metrics,
        binary_report=metrics,
        history=history,
        focus_ratios=list(ratios),
    )


def test_run_scenario_writes_artifacts(tiny_corpora, tiny_grid_config, tmp_path):
    run = run_scenario(build_scenario("E1", [1], {}), tiny_corpora, tiny_grid_config, 1, tmp_path)
    assert run.status == "ok", run.error
    assert (tmp_path / "runs" / "E1-seed1.sdw").exists()
    assert (tmp_path / "runs" / "E1-seed1.history.csv").exists()
    stored = json.loads((tmp_path / "runs" / "E1-seed1.json").read_text())
    assert stored["report"]["f1"] == run.report.f1
    assert run.part_report is not None


def test_transfer_scenario_caches_source(tiny_corpora, tiny_grid_config, tmp_path):
    run = run_scenario(build_scenario("E2", [1], {}), tiny_corpora, tiny_grid_config, 1, tmp_path)
    assert run.status == "ok", run.error
    assert run.source_history is not None
    assert len(list((tmp_path / "sources").glob("generic-*-seed1.sdw"))) == 1


@pytest.mark.parametrize("balanced", [True, False])
def test_balancing_flag_selects_target_splits(balanced, tiny_corpora, tiny_grid_config, tmp_path, mocker):
    spy = mocker.spy(runner, "pretrain_then_finetune")
    scenario = build_scenario("E1", [1], {"DF4": balanced})
    run = run_scenario(scenario, tiny_corpora, tiny_grid_config, 1, tmp_path)
    assert run.status == "ok", run.error
    train, val = spy.call_args.args[1]
    target = tiny_corpora.target
    expected = (target.train, target.val) if balanced else (target.raw_train, target.raw_val)
    assert [s.key for s in train.samples] == [s.key for s in expected[0].samples]
    assert [s.key for s in val.samples] == [s.key for s in expected[1].samples]


def test_unbalanced_splits_keep_every_segment(tiny_corpora):
    target = tiny_corpora.target
    assert len(target.raw_train.samples) > len(target.train.samples)
    unbalanced = target.unbalanced()
    assert unbalanced.train is target.raw_train
    assert unbalanced.test is target.raw_test


@pytest.mark.parametrize("experiment_id", ["E4", "E6", "E8"])
def test_other_cells_run(experiment_id, tiny_corpora, tiny_grid_config, tmp_path):
    run = run_scenario(build_scenario(experiment_id, [1], {}), tiny_corpora, tiny_grid_config, 1, tmp_path)
    assert run.status == "ok", run.error
    assert run.binary_report is not None
    if experiment_id == "E4":
        assert run.history is None
    if experiment_id == "E8":
        assert run.threshold is not None and run.test_tuned_report is not None
    if experiment_id == "E6":
        assert run.report.mode.value == "macro"


def test_failures_are_recorded_not_raised(tiny_corpora, tiny_grid_config, tmp_path, mocker):
    mocker.patch("sdds_lab.harness.runner.pretrain_then_finetune", side_effect=RuntimeError("boom"))
    run = run_scenario(build_scenario("E1", [1], {}), tiny_corpora, tiny_grid_config, 1, tmp_path)
    assert run.status == "failed"
    assert run.error == "RuntimeError: boom"


def test_missing_source_corpus_fails_the_scenario(tiny_corpora, tiny_grid_config, tmp_path):
    tiny_corpora.generic = None
    run = run_scenario(build_scenario("E2", [1], {}), tiny_corpora, tiny_grid_config, 1, tmp_path)
    assert run.status == "failed"
    assert "generic source corpus" in run.error


@pytest.mark.integration
def test_grid_writes_result_and_panel(tiny_corpora, tiny_grid_config, tmp_path):
    config = tiny_grid_config.model_copy(update={"scenarios": ["E2", "E1"]})
    result = run_grid(config, tmp_path, corpora=tiny_corpora)
    assert [(r.experiment_id, r.seed) for r in result.runs] == [("E1", 1), ("E2", 1)]
    assert [s.experiment_id for s in result.summaries] == ["E1", "E2"]
    assert read_result(tmp_path) == result
    assert (tmp_path / RESULT_FILE).exists()
    assert (tmp_path / "saliency" / "panel-seed1.png").exists()


@pytest.mark.integration
def test_grid_is_deterministic(tiny_corpora, tiny_grid_config, tmp_path):
    config = tiny_grid_config.model_copy(update={"scenarios": ["E1"]})
    first = run_grid(config, tmp_path / "a", corpora=tiny_corpora)
    second = run_grid(config, tmp_path / "b", corpora=tiny_corpora)
    assert first.summaries == second.summaries
    assert first.runs[0].history == second.runs[0].history


def test_grid_records_failed_scenarios(tiny_corpora, tiny_grid_config, tmp_path, mocker):
    mocker.patch("sdds_lab.harness.runner.pretrain_then_finetune", side_effect=RuntimeError("boom"))
    result = run_grid(tiny_grid_config.model_copy(update={"scenarios": ["E1"]}), tmp_path, corpora=tiny_corpora)
    assert [(r.experiment_id, r.status) for r in result.failed_runs()] == [("E1", "failed")]
    assert result.summaries == []


def test_grid_without_scenarios_is_an_error(tmp_path):
    with pytest.raises(ValueError, match="no scenarios"):
        run_grid(GridConfig(scenarios=["E7"], information_values=[HeadKind.BINARY]), tmp_path)


def test_summarize_skips_failed_seeds():
    scenario = build_scenario("E1", [1, 2, 3], {})
    runs = [
        _ok_run("E1", 1, 0.6, stop=4, ratios=[0.5, 2.0]),
        _ok_run("E1", 2, 0.8, stop=6, ratios=[3.0]),
        ScenarioRun(experiment_id="E1", seed=3, status="failed", error="x"),
    ]
    summary = summarize(scenario, runs)
    assert summary.mean.f1 == pytest.approx(0.7)
    assert summary.spread.f1 == pytest.approx(0.2)
    assert summary.mean_stop_epoch == 5
    assert summary.median_focus_ratio == 2.0
    assert (summary.seeds, summary.failed_seeds) == ([1, 2], [3])


def test_summarize_all_failed_is_none():
    runs = [ScenarioRun(experiment_id="E1", seed=1, status="failed", error="x")]
    assert summarize(build_scenario("E1", [1], {}), runs) is None


def _summary(eid, f1, stop=None, focus=None):
    head, transfer = {
        "E1": (HeadKind.BINARY, TransferMode.NONE),
        "E2": (HeadKind.BINARY, TransferMode.GENERIC),
        "E5": (HeadKind.MULTICLASS, TransferMode.NONE),
        "E6": (HeadKind.MULTICLASS, TransferMode.GENERIC),
        "E8": (HeadKind.SEGMENTATION, TransferMode.INDUSTRIAL),
    }[eid]
    return ScenarioSummary(
        experiment_id=eid,
        information_value=head,
        knowledge_transfer=transfer,
        mean=MetricValues(f1=f1),
        spread=MetricValues(),
        mean_binary_f1=f1,
        mean_stop_epoch=stop,
        median_focus_ratio=focus,
    )


def test_transfer_margin_is_required():
    checks = {c.name: c.holds for c in check_hypotheses([_summary("E1", 0.88, 10), _summary("E2", 0.9, 12)])}
    assert checks == {
        "generic transfer beats scratch (binary)": False,
        "generic transfer converges no later (binary)": False,
    }


def test_segmentation_tolerance():
    checks = {c.name: c.holds for c in check_hypotheses([_summary("E6", 0.9), _summary("E8", 0.885)])}
    assert checks["segmentation matches multiclass"]


def test_focus_check_uses_true_positive_share():
    summaries = [_summary("E1", 0.7, focus=0.9), _summary("E2", 0.95, focus=2.5)]
    runs = [_ok_run("E2", 1, 0.95, ratios=[2.0, 3.0, 0.5, 4.0])]
    checks = {c.name: c for c in check_hypotheses(summaries, runs)}
    assert checks["transfer model attends to defects"].holds
    assert "75%" in checks["transfer model attends to defects"].detail


def test_source_cache_key_separates_configs(tiny_spec, fast_train_config, tmp_path):
    a = source_weights_path(tmp_path, "generic", tiny_spec, fast_train_config)
    b = source_weights_path(tmp_path, "generic", tiny_spec, fast_train_config.model_copy(update={"seed": 2}))
    c = source_weights_path(tmp_path, "generic", tiny_spec, fast_train_config)
    assert a == c and a != b
    assert a.name.endswith("-es1-do0-aug0-seed0.sdw")


def test_segment_verdicts_need_threshold(tiny_segmentation_spec):
    state = build_model(tiny_segmentation_spec, 0)
    outputs = np.zeros((1, 8, 8, 3))
    outputs[..., 1] = 0.1
    assert segment_verdicts(state, outputs, 6.0) == [1]
    assert segment_verdicts(state, outputs, 6.5) == [0]
    with pytest.raises(ValueError, match="threshold"):
        segment_verdicts(state, outputs, None)
