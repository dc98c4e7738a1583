"""Corpus generation command."""

import logging

import typer

from sdds_lab.data.corpora import generate_raw_corpora, write_raw_corpora

from .shared import (
    ConfigFileOption,
    OutDirOption,
    SeedOption,
    VerboseOption,
    load_corpora_config,
    setup_logging,
)

logger = logging.getLogger(__name__)


def generate_command(
    out: OutDirOption,
    config_file: ConfigFileOption = None,
    seed: SeedOption = None,
    verbose: VerboseOption = False,
):
    """Generate the synthetic target, generic and industrial corpora.

    Each corpus is written as a dataset directory (manifest.json plus PNG
    images and masks) under the output directory.

    Examples:

        sdds generate --out data

        sdds generate --config grid.json --out data --seed 42
    """
    setup_logging(verbose)

    config = load_corpora_config(config_file)
    if seed is not None:
        config.target = config.target.model_copy(update={"seed": seed})

    typer.echo(f"Generating corpora with seed {config.target.seed}...")
    raw = generate_raw_corpora(config)
    written = write_raw_corpora(raw, out)
    for name, manifest in raw.items():
        typer.echo(
            f"  {name}: {len(manifest.samples)} images, "
            f"{manifest.defective_count()} defective -> {written[name]}"
        )
