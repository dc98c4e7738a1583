"""Architecture builders for the three output heads."""

import logging
from typing import Optional

import numpy as np

from sdds_lab.engine.init import init_weights
from sdds_lab.models import (
    ConvBlockSpec,
    HeadKind,
    HeadSpec,
    ModelSpec,
    ModelState,
    TransferMode,
)

logger = logging.getLogger(__name__)

CLASSIFIER_CHANNELS: tuple[int, ...] = (8, 16, 32, 32, 64)
SEGMENTATION_CHANNELS: tuple[int, ...] = (8, 16, 32)


def default_model_spec(
    head: HeadSpec,
    input_shape: tuple[int, int, int] = (64, 64, 1),
    dropout_rate: float = 0.5,
) -> ModelSpec:
    """Desk-scale architecture for ``head``.

    Classification heads get up to five pooled conv blocks, as many as the
    input size allows; segmentation heads get a three-level encoder whose
    deepest block is not pooled.

    Examples:
        >>> spec = default_model_spec(HeadSpec(kind=HeadKind.BINARY))
        >>> [b.channels for b in spec.backbone]
        [8, 16, 32, 32, 64]
        >>> seg = default_model_spec(HeadSpec(kind=HeadKind.SEGMENTATION, num_classes=3))
        >>> [b.pooling for b in seg.backbone]
        [True, True, False]
    """
    if head.kind == HeadKind.SEGMENTATION:
        blocks = [
            ConvBlockSpec(channels=c, pooling=i < len(SEGMENTATION_CHANNELS) - 1)
            for i, c in enumerate(SEGMENTATION_CHANNELS)
        ]
    else:
        depth = min(len(CLASSIFIER_CHANNELS), int(np.log2(min(input_shape[:2]))))
        blocks = [ConvBlockSpec(channels=c) for c in CLASSIFIER_CHANNELS[:depth]]
    return ModelSpec(
        backbone=blocks, head=head, input_shape=input_shape, dropout_rate=dropout_rate
    )


def head_for_labels(kind: HeadKind, label_names: list[str]) -> HeadSpec:
    """Head matching a label set whose first entry is the non-defective class.

    Examples:
        >>> head_for_labels(HeadKind.MULTICLASS, ["ok", "nonfill", "dirt"]).num_classes
        3
        >>> head_for_labels(HeadKind.SEGMENTATION, ["ok", "nonfill", "dirt"]).output_channels
        3
    """
    if kind == HeadKind.BINARY:
        return HeadSpec(kind=kind, num_classes=1)
    if kind == HeadKind.MULTICLASS:
        return HeadSpec(kind=kind, num_classes=len(label_names))
    return HeadSpec(kind=kind, num_classes=max(len(label_names) - 1, 1))


def source_spec_for(
    target: ModelSpec,
    mode: TransferMode,
    source_label_names: list[str],
    source_head_kind: Optional[HeadKind] = None,
) -> ModelSpec:
    """Spec of the source model whose backbone will be transferred into ``target``.

    The backbone and input shape are the target's; the head fits the source
    corpus. Generic sources are texture classifiers; industrial sources use
    the target's own head kind unless ``source_head_kind`` overrides it.

    Examples:
        >>> target = default_model_spec(HeadSpec(kind=HeadKind.BINARY))
        >>> source_spec_for(target, TransferMode.GENERIC, ["a", "b", "c"]).head.num_classes
        3
    """
    if mode == TransferMode.NONE:
        raise ValueError("transfer mode 'none' has no source model")
    if mode == TransferMode.GENERIC:
        head = HeadSpec(kind=HeadKind.MULTICLASS, num_classes=len(source_label_names))
    else:
        head = head_for_labels(source_head_kind or target.head.kind, source_label_names)
    return target.model_copy(update={"head": head}, deep=True)


def build_model(spec: ModelSpec, seed: int) -> ModelState:
    """Compile ``spec`` into a freshly initialized model.

    Examples:
        >>> import numpy as np
        >>> from sdds_lab.engine.network import forward
        >>> state = build_model(default_model_spec(HeadSpec(kind=HeadKind.BINARY)), seed=0)
        >>> forward(state, np.zeros((2, 64, 64, 1))).shape
        (2, 1)
        >>> state.parameter_count < 100_000
        True
    """
    state = init_weights(spec, seed)
    logger.info(
        f"Built {spec.head.kind.value} model: {len(spec.backbone)} blocks, "
        f"{state.parameter_count} parameters"
    )
    return state
