"""Shared CLI options and utilities."""

import logging
from pathlib import Path
from typing import Any, Optional

import typer
from ruamel.yaml import YAML  # type: ignore
from typing_extensions import Annotated

from sdds_lab.models import CorporaConfig, GridConfig

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILES = (Path(".sdds.yaml"), Path(".sdds.yml"), Path("sdds.json"))

# Common option definitions for reuse
ConfigFileOption = Annotated[
    Optional[Path],
    typer.Option(
        "--config",
        help="Grid / corpus configuration file (.yaml or .json)",
    ),
]

OutDirOption = Annotated[
    Path,
    typer.Option(
        "--out",
        "-o",
        help="Output directory",
    ),
]

DataDirOption = Annotated[
    Path,
    typer.Option(
        "--data",
        "-d",
        help="Directory written by 'sdds generate' (target/, generic/, industrial/)",
    ),
]

SeedOption = Annotated[
    Optional[int],
    typer.Option(
        "--seed",
        "-s",
        help="Seed overriding the configured one",
    ),
]

VerboseOption = Annotated[
    bool,
    typer.Option(
        "--verbose",
        "-v",
        help="Verbose output with detailed logging",
    ),
]

ForceOption = Annotated[
    bool,
    typer.Option(
        "--force",
        "-f",
        help="Retrain cached source models",
    ),
]


def setup_logging(verbose: bool) -> None:
    """Configure logging based on verbosity flag.

    Args:
        verbose: If True, set logging level to INFO
    """
    if verbose:
        logging.basicConfig(level=logging.INFO)


def find_config_file(config_file: Optional[Path]) -> Optional[Path]:
    """The given file, or the first default config file in the working directory."""
    if config_file is not None:
        return config_file
    for default_path in DEFAULT_CONFIG_FILES:
        if default_path.exists():
            return default_path
    return None


def read_config_data(config_file: Optional[Path]) -> Optional[dict[str, Any]]:
    """Parse a YAML or JSON config file; JSON is read as YAML 1.2."""
    config_file = find_config_file(config_file)
    if config_file is None:
        return None
    yaml = YAML(typ="safe")
    with open(config_file) as f:
        data = yaml.load(f)
    logger.info(f"Loaded configuration from {config_file}")
    return data if isinstance(data, dict) else None


def _section(data: Optional[dict[str, Any]], names: tuple[str, ...], fields: set[str]) -> Optional[dict[str, Any]]:
    """First named section that is a mapping, else the whole mapping if it holds known fields."""
    if not data:
        return None
    for name in names:
        if name in data:
            section = data.get(name)
            return section if isinstance(section, dict) else None
    if fields.intersection(data.keys()):
        return data
    return None


def load_grid_config(config_file: Optional[Path]) -> GridConfig:
    """Load a grid configuration from a ``grid:`` section or a bare mapping.

    Args:
        config_file: Path to config file, or None for discovery / defaults

    Returns:
        GridConfig instance
    """
    data = _section(read_config_data(config_file), ("grid",), set(GridConfig.model_fields))
    return GridConfig(**data) if data else GridConfig()


def load_corpora_config(config_file: Optional[Path]) -> CorporaConfig:
    """Load corpus settings from a ``corpus:`` section, a grid config's corpora, or a bare mapping."""
    data = read_config_data(config_file)
    grid = _section(data, ("grid",), set(GridConfig.model_fields))
    if grid and "corpora" in grid:
        section: Optional[dict[str, Any]] = grid["corpora"]
    else:
        section = _section(data, ("corpus", "corpora"), set(CorporaConfig.model_fields))
    return CorporaConfig(**section) if section else CorporaConfig()
