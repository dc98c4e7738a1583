"""Scenario, grid and report commands."""

import logging
from pathlib import Path
from typing import Optional

import typer
from typing_extensions import Annotated

from sdds_lab.data.corpora import prepare_corpora, read_raw_corpora
from sdds_lab.harness.grid import read_result, run_grid
from sdds_lab.harness.report import report
from sdds_lab.harness.runner import run_scenario
from sdds_lab.harness.scenarios import build_scenario
from sdds_lab.models import GridResult, MetricsReport

from .shared import (
    ConfigFileOption,
    DataDirOption,
    ForceOption,
    OutDirOption,
    SeedOption,
    VerboseOption,
    load_grid_config,
    setup_logging,
)

logger = logging.getLogger(__name__)


def _echo_metrics(label: str, metrics: Optional[MetricsReport]) -> None:
    if metrics is None:
        return
    typer.echo(
        f"  {label}: accuracy={metrics.accuracy:.3f} precision={metrics.precision:.3f} "
        f"recall={metrics.recall:.3f} f1={metrics.f1:.3f}"
    )


def _exit_on_failures(result: GridResult) -> None:
    failed = result.failed_runs()
    if failed:
        names = ", ".join(f"{run.experiment_id} (seed {run.seed})" for run in failed)
        typer.echo(f"Failed scenarios: {names}", err=True)
        for run in failed:
            typer.echo(f"  {run.experiment_id}: {run.error}", err=True)
        raise typer.Exit(1)


def train_command(
    scenario: Annotated[str, typer.Option("--scenario", "-e", help="Experiment id (E1..E8)")],
    data: DataDirOption,
    seed: SeedOption = None,
    out: Annotated[
        Path,
        typer.Option("--out", "-o", help="Output directory for weights and history"),
    ] = Path("runs"),
    config_file: ConfigFileOption = None,
    force: ForceOption = False,
    verbose: VerboseOption = False,
):
    """Train and evaluate one scenario for one seed.

    Examples:

        sdds train --scenario E2 --data data --seed 1

        sdds train --scenario E7 --data data --seed 3 --out runs --verbose
    """
    setup_logging(verbose)

    config = load_grid_config(config_file)
    if force:
        config.force = True
    run_seed = seed if seed is not None else config.seeds[0]
    try:
        selected = build_scenario(
            scenario.upper(), [run_seed], config.design_features.get(scenario.upper(), {})
        )
    except ValueError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)

    corpora = prepare_corpora(read_raw_corpora(data), config.corpora)
    typer.echo(f"Running {selected.experiment_id} with seed {run_seed}...")
    run = run_scenario(selected, corpora, config, run_seed, out)

    if run.status == "failed":
        typer.echo(f"Scenario {run.experiment_id} failed: {run.error}", err=True)
        raise typer.Exit(1)
    _echo_metrics("segment", run.report)
    if run.report is not run.binary_report:
        _echo_metrics("one-vs-all", run.binary_report)
    _echo_metrics("test-tuned threshold", run.test_tuned_report)
    _echo_metrics("part", run.part_report)
    if run.stop_epoch:
        typer.echo(f"  stopped at epoch {run.stop_epoch}")
    typer.echo(f"  weights: {run.weights_path}")


def grid_command(
    out: OutDirOption,
    config_file: ConfigFileOption = None,
    data: Annotated[
        Optional[Path],
        typer.Option("--data", "-d", help="Use corpora written by 'sdds generate' instead of generating"),
    ] = None,
    workers: Annotated[
        Optional[int],
        typer.Option("--workers", "-w", help="Parallel worker processes (one seed each)"),
    ] = None,
    force: ForceOption = False,
    verbose: VerboseOption = False,
):
    """Run the E1..E8 scenario grid and print the comparison table.

    Exits with code 1 naming every failed scenario; the results of the
    others are still written to grid_result.json.

    Examples:

        sdds grid --config grid.json --out results

        sdds grid --config grid.yaml --data data --out results --workers 3
    """
    setup_logging(verbose)

    config = load_grid_config(config_file)
    if force:
        config.force = True
    if workers is not None:
        config.workers = workers

    corpora = prepare_corpora(read_raw_corpora(data), config.corpora) if data else None
    typer.echo(f"Running {len(config.scenarios)} scenarios x {len(config.seeds)} seeds...")
    try:
        result = run_grid(config, out, corpora)
    except ValueError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)

    if result.summaries:
        typer.echo(report(result, "table"))
    _exit_on_failures(result)


def report_command(
    results: Annotated[Path, typer.Argument(help="Grid output directory or grid_result.json")],
    fmt: Annotated[
        str,
        typer.Option("--format", "-f", help="Output format: table or csv"),
    ] = "table",
):
    """Render a finished grid's results without rerunning it.

    Examples:

        sdds report results

        sdds report results --format csv > results.csv
    """
    if fmt not in ("table", "csv"):
        typer.echo(f"Error: unknown format '{fmt}' (expected table or csv)", err=True)
        raise typer.Exit(1)
    try:
        result = read_result(results)
        text = report(result, fmt)  # type: ignore[arg-type]
    except (OSError, ValueError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)
    typer.echo(text, nl=False)
