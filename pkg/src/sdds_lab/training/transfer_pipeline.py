"""Pre-train on a source corpus, transfer the backbone, fine-tune on the target."""

import logging
from pathlib import Path
from typing import Optional

from sdds_lab.engine.weights_io import load_weights, save_weights
from sdds_lab.models import (
    DatasetManifest,
    ModelSpec,
    ModelState,
    TrainConfig,
    TrainHistory,
    TransferMode,
    TransferPlan,
)
from sdds_lab.networks.builder import build_model
from sdds_lab.networks.transfer import transfer_weights
from sdds_lab.training.trainer import read_history, train, write_history

logger = logging.getLogger(__name__)


def history_path_for(weights_path: Path) -> Path:
    """History CSV stored next to a weight file.

    Examples:
        >>> history_path_for(Path("sources/generic-seed1.sdw")).name
        'generic-seed1.history.csv'
    """
    return weights_path.with_suffix(".history.csv")


def train_source_model(
    spec: ModelSpec,
    train_manifest: DatasetManifest,
    val_manifest: DatasetManifest,
    config: TrainConfig,
    weights_path: Path,
    force: bool = False,
) -> tuple[ModelState, Optional[TrainHistory]]:
    """Train a source model and save it, or reuse the weights already at ``weights_path``.

    Returns:
        (model, history); the history is read back from disk when the weights are reused
    """
    weights_path = Path(weights_path)
    if weights_path.exists() and not force:
        logger.info(f"Reusing source weights {weights_path}")
        state = load_weights(weights_path)
        history_path = history_path_for(weights_path)
        return state, read_history(history_path) if history_path.exists() else None

    logger.info(f"Training source model for {weights_path.name}")
    state, history = train(build_model(spec, config.seed), train_manifest, val_manifest, config)
    save_weights(state, weights_path)
    write_history(history, history_path_for(weights_path))
    return state, history


def pretrain_then_finetune(
    source: Optional[tuple[DatasetManifest, DatasetManifest]],
    target: tuple[DatasetManifest, DatasetManifest],
    source_spec: Optional[ModelSpec],
    target_spec: ModelSpec,
    plan: TransferPlan,
    source_config: Optional[TrainConfig],
    target_config: TrainConfig,
    force: bool = False,
) -> tuple[ModelState, Optional[TrainHistory], TrainHistory]:
    """Train a source model, hand its backbone to the target model and fine-tune.

    With plan mode ``none`` the source phase is skipped and the target model
    trains from scratch. Otherwise the source weights pass through the file
    named by the plan, so an in-memory and an on-disk handoff are identical.

    Args:
        source: (train, val) source splits; required unless the mode is ``none``
        target: (train, val) target splits
        source_spec: Source architecture sharing the target backbone
        target_spec: Target architecture
        plan: Transfer plan naming the source weight file
        source_config: Source training config
        target_config: Fine-tuning config
        force: Retrain the source even if its weight file exists

    Returns:
        (target model, source history or None, target history)
    """
    if plan.mode == TransferMode.NONE:
        state, history = train(build_model(target_spec, target_config.seed), *target, target_config)
        return state, None, history

    if source is None or source_spec is None or source_config is None:
        raise ValueError(f"transfer mode '{plan.mode.value}' needs source splits, spec and config")
    if plan.source_weights is None:
        raise ValueError("transfer plan names no source weight file")
    _, source_history = train_source_model(
        source_spec, *source, source_config, plan.source_weights, force=force
    )
    report = transfer_weights(
        build_model(target_spec, target_config.seed), plan, seed=target_config.seed
    )
    state, history = train(report.state, *target, target_config)
    return state, source_history, history
