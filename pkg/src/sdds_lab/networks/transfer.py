"""Backbone weight transfer between models."""

import logging
from typing import Optional

import numpy as np

from sdds_lab.engine.init import initialize_parameters
from sdds_lab.engine.weights_io import load_weights
from sdds_lab.models import (
    ModelState,
    Parameter,
    TransferMode,
    TransferPlan,
    TransferReport,
)

logger = logging.getLogger(__name__)


class TransferError(ValueError):
    """Source and target backbones are incompatible."""


def transfer_weights(
    target: ModelState,
    plan: TransferPlan,
    source: Optional[ModelState] = None,
    seed: int = 0,
) -> TransferReport:
    """Copy the source backbone into a copy of ``target`` and reinitialize its head.

    Tensors are matched by name. The source is ``source`` when given, otherwise
    the weight file named by the plan.

    Args:
        target: Model receiving the backbone; left unchanged
        plan: Transfer plan; mode must not be ``none``
        source: In-memory source model
        seed: Seed for the head reinitialization

    Returns:
        TransferReport with the new state and the copied / reinitialized tensor names

    Raises:
        TransferError: if a backbone tensor is missing from the source or has
            a different shape; the message names the tensor

    Examples:
        >>> from sdds_lab.models import HeadKind, HeadSpec
        >>> from sdds_lab.networks.builder import build_model, default_model_spec
        >>> spec = default_model_spec(HeadSpec(kind=HeadKind.BINARY), input_shape=(32, 32, 1))
        >>> src, dst = build_model(spec, seed=1), build_model(spec, seed=2)
        >>> report = transfer_weights(dst, TransferPlan(mode=TransferMode.GENERIC), source=src)
        >>> report.reinitialized
        ['head.dense.weight', 'head.dense.bias']
    """
    if plan.mode == TransferMode.NONE:
        raise TransferError("transfer mode 'none' has nothing to transfer")
    if source is None:
        if plan.source_weights is None:
            raise TransferError("transfer plan names no source weights")
        source = load_weights(plan.source_weights)

    source_backbone = set(source.backbone_names())
    target_backbone = target.backbone_names()
    for name in target_backbone:
        if name not in source.params:
            raise TransferError(f"source model has no tensor '{name}'")
        if source.params[name].shape != target.params[name].shape:
            raise TransferError(
                f"tensor '{name}' has shape {source.params[name].shape} in the source "
                f"but {target.params[name].shape} in the target"
            )
    extra = sorted(source_backbone - set(target_backbone))
    if extra:
        raise TransferError(f"source backbone tensor '{extra[0]}' has no target counterpart")

    state = target.clone()
    for name in target_backbone:
        state.params[name] = Parameter(source.params[name].value.copy())
    fresh = initialize_parameters(state.layers, np.random.default_rng(seed), prefix="head.")
    state.params.update(fresh)

    logger.info(
        f"Transferred {len(target_backbone)} backbone tensors ({plan.mode.value}); "
        f"reinitialized {len(fresh)} head tensors"
    )
    return TransferReport(state=state, copied=list(target_backbone), reinitialized=list(fresh))
