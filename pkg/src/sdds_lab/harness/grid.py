"""Run the scenario grid over seeds, summarize and check the expected orderings."""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from statistics import mean, median
from typing import Optional

from sdds_lab.data.corpora import Corpora, build_corpora
from sdds_lab.data.dataset_io import load_samples
from sdds_lab.engine.weights_io import load_weights
from sdds_lab.explain.render import render_panel
from sdds_lab.explain.saliency import saliency
from sdds_lab.harness.runner import run_scenario
from sdds_lab.harness.scenarios import build_scenarios, experiment_order
from sdds_lab.models import (
    GridConfig,
    GridResult,
    HypothesisCheck,
    MetricValues,
    Scenario,
    ScenarioRun,
    ScenarioSummary,
)

logger = logging.getLogger(__name__)

RESULT_FILE = "grid_result.json"
PANEL_DIR = "saliency"
PANEL_COLUMNS = ("E1", "E2", "E3")
TRANSFER_MARGIN = 0.05
SEGMENTATION_TOLERANCE = 0.02
FOCUS_SHARE = 0.7


def run_seed(
    scenarios: list[Scenario], corpora: Corpora, config: GridConfig, seed: int, out_dir: Path
) -> list[ScenarioRun]:
    """All scenarios of one seed, in order; scenarios sharing a cached source run in sequence."""
    return [run_scenario(scenario, corpora, config, seed, out_dir) for scenario in scenarios]


def _spread(values: list[float]) -> float:
    return max(values) - min(values) if values else 0.0


def summarize(scenario: Scenario, runs: list[ScenarioRun]) -> Optional[ScenarioSummary]:
    """Mean and max-min spread over the successful seeds of one scenario.

    Returns:
        None when every seed failed
    """
    ok = [run for run in runs if run.status == "ok" and run.report is not None]
    if not ok:
        return None
    fields = list(MetricValues.model_fields)
    values = {name: [getattr(run.report, name) for run in ok] for name in fields}
    stop_epochs = [run.stop_epoch for run in ok if run.stop_epoch]
    ratios = [ratio for run in ok for ratio in run.focus_ratios]
    return ScenarioSummary(
        experiment_id=scenario.experiment_id,
        information_value=scenario.information_value,
        knowledge_transfer=scenario.knowledge_transfer,
        mean=MetricValues(**{name: mean(v) for name, v in values.items()}),
        spread=MetricValues(**{name: _spread(v) for name, v in values.items()}),
        mean_binary_f1=mean(run.binary_report.f1 for run in ok if run.binary_report),
        mean_stop_epoch=mean(stop_epochs) if stop_epochs else None,
        median_focus_ratio=median(ratios) if ratios else None,
        seeds=[run.seed for run in ok],
        failed_seeds=[run.seed for run in runs if run.status == "failed"],
    )


def check_hypotheses(
    summaries: list[ScenarioSummary], runs: Optional[list[ScenarioRun]] = None
) -> list[HypothesisCheck]:
    """Knowledge-transfer and information-value orderings over the summarized scenarios.

    A check is only emitted when both of its scenarios have a summary.

    Examples:
        >>> from sdds_lab.models import HeadKind, TransferMode
        >>> def summary(eid, f1, stop):
        ...     return ScenarioSummary(experiment_id=eid, information_value=HeadKind.BINARY,
        ...         knowledge_transfer=TransferMode.NONE, mean=MetricValues(f1=f1),
        ...         spread=MetricValues(), mean_binary_f1=f1, mean_stop_epoch=stop)
        >>> [(c.name, c.holds) for c in check_hypotheses([summary("E1", 0.7, 20), summary("E2", 0.9, 12)])]
        [('generic transfer beats scratch (binary)', True), ('generic transfer converges no later (binary)', True)]
    """
    by_id = {s.experiment_id: s for s in summaries}
    checks: list[HypothesisCheck] = []

    def both(a: str, b: str) -> bool:
        return a in by_id and b in by_id

    def add(name: str, holds: bool, detail: str) -> None:
        checks.append(HypothesisCheck(name=name, holds=holds, detail=detail))

    if both("E1", "E2"):
        e1, e2 = by_id["E1"], by_id["E2"]
        add(
            "generic transfer beats scratch (binary)",
            e2.mean.f1 >= e1.mean.f1 + TRANSFER_MARGIN,
            f"E2 F1 {e2.mean.f1:.3f} vs E1 F1 {e1.mean.f1:.3f} (margin {TRANSFER_MARGIN})",
        )
        if e1.mean_stop_epoch is not None and e2.mean_stop_epoch is not None:
            add(
                "generic transfer converges no later (binary)",
                e2.mean_stop_epoch <= e1.mean_stop_epoch,
                f"E2 stop epoch {e2.mean_stop_epoch:.1f} vs E1 {e1.mean_stop_epoch:.1f}",
            )
    for transfer, scratch, label in (
        ("E3", "E1", "industrial transfer beats scratch (binary)"),
        ("E6", "E5", "generic transfer beats scratch (multiclass)"),
        ("E8", "E7", "industrial transfer beats scratch (segmentation)"),
    ):
        if both(transfer, scratch):
            a, b = by_id[transfer], by_id[scratch]
            add(label, a.mean.f1 > b.mean.f1, f"{transfer} F1 {a.mean.f1:.3f} vs {scratch} F1 {b.mean.f1:.3f}")
    if both("E1", "E5"):
        a, b = by_id["E1"], by_id["E5"]
        add(
            "binary no harder than multiclass",
            a.mean_binary_f1 >= b.mean_binary_f1,
            f"E1 binary F1 {a.mean_binary_f1:.3f} vs E5 one-vs-all F1 {b.mean_binary_f1:.3f}",
        )
    if both("E8", "E6"):
        a, b = by_id["E8"], by_id["E6"]
        add(
            "segmentation matches multiclass",
            a.mean_binary_f1 >= b.mean_binary_f1 - SEGMENTATION_TOLERANCE,
            f"E8 binary F1 {a.mean_binary_f1:.3f} vs E6 one-vs-all F1 {b.mean_binary_f1:.3f}",
        )
    if both("E1", "E2") and by_id["E2"].median_focus_ratio is not None:
        e2_ratios = [r for run in runs or [] if run.experiment_id == "E2" for r in run.focus_ratios]
        share = sum(r > 1.0 for r in e2_ratios) / len(e2_ratios) if e2_ratios else 0.0
        e1_median = by_id["E1"].median_focus_ratio or 0.0
        e2_median = by_id["E2"].median_focus_ratio or 0.0
        add(
            "transfer model attends to defects",
            share >= FOCUS_SHARE and e2_median > e1_median,
            f"E2 focus > 1 on {share:.0%} of true positives; median {e2_median:.2f} vs E1 {e1_median:.2f}",
        )
    return checks


def write_saliency_panel(
    runs: list[ScenarioRun], corpora: Corpora, seed: int, samples: int, out_dir: Path
) -> Optional[Path]:
    """Input | E1 | E2 | E3 saliency panel over the first defective test samples of one seed."""
    by_id = {
        run.experiment_id: run
        for run in runs
        if run.seed == seed and run.status == "ok" and run.weights_path
    }
    columns = [eid for eid in PANEL_COLUMNS if eid in by_id]
    if not columns or samples == 0:
        return None
    chosen = [s for s in load_samples(corpora.target.test) if s.is_defective][:samples]
    if not chosen:
        return None
    maps = []
    for eid in columns:
        state = load_weights(Path(str(by_id[eid].weights_path)))
        maps.append([saliency(state, s.image, 1, s.sample_id) for s in chosen])
    return render_panel(
        [s.image for s in chosen], maps, Path(out_dir) / PANEL_DIR / f"panel-seed{seed}.png"
    )


def run_grid(
    config: GridConfig,
    out_dir: Path,
    corpora: Optional[Corpora] = None,
) -> GridResult:
    """Execute every selected scenario for every seed and write ``grid_result.json``.

    Seeds run in parallel worker processes when ``config.workers > 1``. A
    failed scenario is recorded and the grid carries on.

    Args:
        config: Grid config
        out_dir: Output directory for runs, cached sources, panels and the result file
        corpora: Prepared corpora; built from ``config.corpora`` when omitted

    Returns:
        GridResult with runs in E1..E8 / seed order, summaries and hypothesis checks
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scenarios = build_scenarios(config)
    if not scenarios:
        raise ValueError("grid selects no scenarios")
    if corpora is None:
        corpora = build_corpora(config.corpora)

    runs: list[ScenarioRun] = []
    if config.workers > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(run_seed, scenarios, corpora, config, seed, out_dir)
                for seed in config.seeds
            ]
            for future in futures:
                runs.extend(future.result())
    else:
        for seed in config.seeds:
            runs.extend(run_seed(scenarios, corpora, config, seed, out_dir))
    runs.sort(key=lambda run: (experiment_order(run.experiment_id), config.seeds.index(run.seed)))

    summaries = []
    for scenario in scenarios:
        summary = summarize(scenario, [r for r in runs if r.experiment_id == scenario.experiment_id])
        if summary is not None:
            summaries.append(summary)
    result = GridResult(runs=runs, summaries=summaries, hypotheses=check_hypotheses(summaries, runs))

    for seed in config.seeds:
        try:
            write_saliency_panel(runs, corpora, seed, config.saliency_samples, out_dir)
        except Exception as e:
            logger.warning(f"Saliency panel for seed {seed} failed: {e}")
    write_result(result, out_dir)
    for run in result.failed_runs():
        logger.warning(f"{run.experiment_id} seed {run.seed} failed: {run.error}")
    return result


def write_result(result: GridResult, out_dir: Path) -> Path:
    path = Path(out_dir) / RESULT_FILE
    path.write_text(result.model_dump_json(indent=2))
    return path


def read_result(path: Path) -> GridResult:
    """Read ``grid_result.json`` from a file or a grid output directory."""
    path = Path(path)
    if path.is_dir():
        path = path / RESULT_FILE
    return GridResult.model_validate_json(path.read_text())
