"""Weight initialization."""

import logging
from typing import Optional

import numpy as np

from sdds_lab.engine.layers import LayerRegistry
from sdds_lab.models import LayerSpec, ModelSpec, ModelState, Parameter
from sdds_lab.networks.architectures import compile_layers

logger = logging.getLogger(__name__)


def initialize_parameters(
    layers: list[LayerSpec], rng: np.random.Generator, prefix: Optional[str] = None
) -> dict[str, Parameter]:
    """He-uniform weights and zero biases for ``layers``, in layer order.

    Args:
        layers: Compiled layer specs
        rng: Generator consumed in layer order
        prefix: Only initialize layers whose name starts with this prefix

    Returns:
        Parameters keyed ``<layer name>.<weight|bias>``
    """
    params: dict[str, Parameter] = {}
    for spec in layers:
        if prefix is not None and not spec.name.startswith(prefix):
            continue
        for suffix, value in LayerRegistry.create(spec).initialize(rng).items():
            params[f"{spec.name}.{suffix}"] = Parameter(value)
    return params


def init_weights(spec: ModelSpec, seed: int) -> ModelState:
    """Compile ``spec`` and draw its weights deterministically from ``seed``.

    Args:
        spec: Architecture descriptor
        seed: Initialization seed

    Returns:
        A fresh ModelState

    Examples:
        >>> from sdds_lab.models import ConvBlockSpec, HeadKind, HeadSpec
        >>> spec = ModelSpec(backbone=[ConvBlockSpec(channels=2)],
        ...                  head=HeadSpec(kind=HeadKind.BINARY), input_shape=(8, 8, 1))
        >>> a, b = init_weights(spec, 3), init_weights(spec, 3)
        >>> all(np.array_equal(a.params[n].value, b.params[n].value) for n in a.params)
        True
        >>> a.params["head.dense.bias"].value.tolist()
        [0.0]
    """
    layers = compile_layers(spec)
    params = initialize_parameters(layers, np.random.default_rng(seed))
    state = ModelState(spec=spec, layers=layers, params=params)
    logger.debug(f"Initialized {len(params)} tensors ({state.parameter_count} weights), seed {seed}")
    return state
