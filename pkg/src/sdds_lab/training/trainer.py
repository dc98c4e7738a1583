"""Mini-batch training loop with early stopping, dropout and augmentation wiring."""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from sdds_lab.data.augment import augment
from sdds_lab.data.dataset_io import load_samples, stack_samples
from sdds_lab.engine.losses import loss, loss_for_head, one_hot
from sdds_lab.engine.network import backward, forward, predict
from sdds_lab.engine.optim import OptimizerState, step
from sdds_lab.evaluation.metrics import binary_report
from sdds_lab.models import (
    DatasetManifest,
    HeadKind,
    ImageSample,
    LayerKind,
    Mode,
    ModelState,
    TrainConfig,
    TrainHistory,
)
from sdds_lab.training.early_stopping import EarlyStopping

logger = logging.getLogger(__name__)


@dataclass
class Batch:
    """Stacked arrays of a split."""

    images: np.ndarray
    labels: np.ndarray
    masks: Optional[np.ndarray]

    @classmethod
    def from_samples(cls, samples: list[ImageSample]) -> "Batch":
        return cls(*stack_samples(samples))


def targets_for(state: ModelState, batch: Batch) -> np.ndarray:
    """Loss targets matching the model's head.

    Raises:
        ValueError: if the labels do not fit the head
    """
    head = state.spec.head
    if head.kind == HeadKind.BINARY:
        return (batch.labels > 0).astype(np.float64)[:, None]
    if head.kind == HeadKind.MULTICLASS:
        return one_hot(batch.labels, head.num_classes)
    if batch.masks is None:
        raise ValueError("segmentation head needs ground-truth masks")
    return one_hot(batch.masks, head.output_channels)


def verdicts_for(state: ModelState, outputs: np.ndarray) -> np.ndarray:
    """Binary segment verdicts used for the validation F1.

    Binary heads threshold at 0.5, multiclass heads collapse the argmax
    one-vs-all, segmentation heads flag any pixel whose argmax is a defect class.
    """
    kind = state.spec.head.kind
    if kind == HeadKind.BINARY:
        return (outputs[:, 0] > 0.5).astype(np.int64)
    classes = np.argmax(outputs, axis=-1)
    if kind == HeadKind.MULTICLASS:
        return (classes > 0).astype(np.int64)
    return (classes > 0).any(axis=(1, 2)).astype(np.int64)


def check_head_labels(state: ModelState, manifest: DatasetManifest) -> None:
    head = state.spec.head
    expected = {
        HeadKind.BINARY: None,
        HeadKind.MULTICLASS: head.num_classes,
        HeadKind.SEGMENTATION: head.output_channels,
    }[head.kind]
    if expected is not None and expected != manifest.num_classes:
        raise ValueError(
            f"{head.kind.value} head with {expected} outputs does not match the "
            f"{manifest.num_classes} labels of '{manifest.name}'"
        )


def evaluate_loss(state: ModelState, batch: Batch, batch_size: int = 64) -> tuple[float, float]:
    """Eval-mode loss and binary F1 of ``state`` on ``batch``."""
    outputs = predict(state, batch.images, batch_size)
    value = loss(loss_for_head(state.spec.head.kind), outputs, targets_for(state, batch)).value
    f1 = binary_report(verdicts_for(state, outputs).tolist(), batch.labels.tolist()).f1
    return value, f1


def apply_dropout_rate(state: ModelState, rate: float) -> None:
    """Set the rate of every dropout layer of ``state``."""
    state.layers = [
        layer.model_copy(update={"rate": rate}) if layer.kind == LayerKind.DROPOUT else layer
        for layer in state.layers
    ]
    state.spec = state.spec.model_copy(update={"dropout_rate": rate})


def train(
    model: ModelState,
    train_manifest: DatasetManifest,
    val_manifest: DatasetManifest,
    config: TrainConfig,
) -> tuple[ModelState, TrainHistory]:
    """Train ``model`` in place and return it with its history.

    Each epoch shuffles the training split, augments training samples when
    configured and evaluates the validation split in eval mode. Shuffling,
    dropout and augmentation draw from independent streams spawned from
    ``config.seed``.

    Args:
        model: Model to train
        train_manifest: Training split
        val_manifest: Validation split (never augmented)
        config: Training hyperparameters

    Returns:
        (model, history); with early stopping and ``restore_best`` the model
        holds the weights of the best validation epoch

    Raises:
        ValueError: on an empty split or a head that does not fit the labels
    """
    for manifest in (train_manifest, val_manifest):
        if not manifest.samples:
            raise ValueError(f"split '{manifest.name}' is empty")
        check_head_labels(model, manifest)
    if config.dropout_rate is not None:
        apply_dropout_rate(model, config.dropout_rate)

    train_samples = load_samples(train_manifest)
    val_batch = Batch.from_samples(load_samples(val_manifest))
    shuffle_seq, dropout_seq, augment_seq = np.random.SeedSequence(config.seed).spawn(3)
    shuffle_rng = np.random.default_rng(shuffle_seq)
    dropout_rng = np.random.default_rng(dropout_seq)
    augment_rng = np.random.default_rng(augment_seq)

    loss_kind = loss_for_head(model.spec.head.kind)
    optimizer = OptimizerState(kind=config.optimizer, learning_rate=config.learning_rate)
    stopper = EarlyStopping(config.early_stopping)
    history = TrainHistory()

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(train_samples))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            chosen = [train_samples[i] for i in order[start : start + config.batch_size]]
            if config.augmentation is not None:
                chosen = [augment(s, config.augmentation, augment_rng) for s in chosen]
            batch = Batch.from_samples(chosen)
            outputs = forward(model, batch.images, Mode.TRAIN, dropout_rng)
            result = loss(loss_kind, outputs, targets_for(model, batch))
            backward(model, result.grad)
            step(optimizer, model)
            total += result.value * len(chosen)

        val_loss, val_f1 = evaluate_loss(model, val_batch)
        history.record(total / len(train_samples), val_loss, val_f1)
        logger.info(
            f"epoch {epoch}: train_loss={history.train_loss[-1]:.4f} "
            f"val_loss={val_loss:.4f} val_f1={val_f1:.3f}"
        )
        if stopper.update(epoch, val_loss, model):
            break

    history.best_epoch = stopper.best_epoch
    if config.early_stopping.enabled and config.early_stopping.restore_best and stopper.snapshot:
        model.restore(stopper.snapshot)
        logger.info(f"Restored weights of epoch {stopper.best_epoch}")
    return model, history


def write_history(history: TrainHistory, path: Path) -> Path:
    """Write ``epoch, train_loss, val_loss, val_f1`` rows as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["epoch", "train_loss", "val_loss", "val_f1"])
        for epoch, row in enumerate(zip(history.train_loss, history.val_loss, history.val_f1), 1):
            writer.writerow([epoch, *(repr(v) for v in row)])
    return path


def read_history(path: Path) -> TrainHistory:
    """Read a history CSV written by ``write_history``; the best epoch is the first minimum."""
    history = TrainHistory()
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            history.record(float(row["train_loss"]), float(row["val_loss"]), float(row["val_f1"]))
    if history.val_loss:
        history.best_epoch = int(np.argmin(history.val_loss)) + 1
    return history
