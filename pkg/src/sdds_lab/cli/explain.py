"""Saliency explanation command."""

import logging
from pathlib import Path

import typer
from typing_extensions import Annotated

from sdds_lab.data.corpora import TARGET
from sdds_lab.data.dataset_io import MANIFEST_FILE, DatasetReadError, load_samples, read_dataset
from sdds_lab.engine.errors import ShapeMismatchError, WeightFileError
from sdds_lab.engine.weights_io import load_weights
from sdds_lab.explain.render import render_panel, save_saliency
from sdds_lab.explain.saliency import saliency, saliency_focus_score

from .shared import DataDirOption, OutDirOption, VerboseOption, setup_logging

logger = logging.getLogger(__name__)


def explain_command(
    weights: Annotated[Path, typer.Option("--weights", "-w", help="Weight file of a trained model")],
    data: DataDirOption,
    out: OutDirOption,
    samples: Annotated[
        int,
        typer.Option("--samples", "-n", help="Number of defective samples to explain"),
    ] = 5,
    target_class: Annotated[
        int,
        typer.Option("--class", help="Class whose score is explained (1 = defective for binary models)"),
    ] = 1,
    verbose: VerboseOption = False,
):
    """Write saliency maps for defective samples and report their focus ratios.

    DATA may be a dataset directory or a corpora directory containing target/.

    Examples:

        sdds explain --weights results/runs/E2-seed1.sdw --data data --out saliency

        sdds explain --weights model.sdw --data data/target --out saliency --samples 10
    """
    setup_logging(verbose)

    dataset_dir = data if (data / MANIFEST_FILE).exists() else data / TARGET
    try:
        state = load_weights(weights)
        manifest = read_dataset(dataset_dir)
    except (OSError, WeightFileError, DatasetReadError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(1)

    chosen = [s for s in load_samples(manifest) if s.is_defective][:samples]
    if not chosen:
        typer.echo(f"Error: no defective samples in {dataset_dir}", err=True)
        raise typer.Exit(1)

    maps = []
    for sample in chosen:
        try:
            smap = saliency(state, sample.image, target_class, sample.sample_id)
        except (ShapeMismatchError, ValueError) as e:
            typer.echo(f"Error: {e}", err=True)
            raise typer.Exit(1)
        maps.append(smap)
        path = save_saliency(smap, out / f"{sample.sample_id}.png")
        line = f"  {sample.sample_id}: {path}"
        if sample.mask is not None and sample.mask.any():
            line += f" focus ratio {saliency_focus_score(smap, sample.mask):.2f}"
        typer.echo(line)

    panel = render_panel([s.image for s in chosen], [maps], out / "panel.png")
    typer.echo(f"Panel: {panel}")
