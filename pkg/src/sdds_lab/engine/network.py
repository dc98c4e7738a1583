"""Forward and backward passes over a compiled layer list.

A model is an ordered list of layers. The only non-sequential edge is the
concat-skip layer, which appends the output of a named earlier layer.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from sdds_lab.engine.errors import (
    BackwardBeforeForwardError,
    NonFiniteError,
    ShapeMismatchError,
)
from sdds_lab.engine.layers import Layer, LayerRegistry
from sdds_lab.models import Gradients, LayerKind, Mode, ModelState

logger = logging.getLogger(__name__)

_OUTPUT_ACTIVATIONS = (LayerKind.SIGMOID, LayerKind.SOFTMAX)


@dataclass
class Tape:
    """Record of one forward pass, consumed by ``backward``."""

    records: list[tuple[Layer, Any]]
    input_shape: tuple[int, ...]
    output_shape: tuple[int, ...]
    mode: Mode


def _layer_params(state: ModelState, layer: Layer) -> dict[str, np.ndarray]:
    prefix = f"{layer.name}."
    return {
        name[len(prefix) :]: p.value for name, p in state.params.items() if name.startswith(prefix)
    }


def _check_finite(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"non-finite values produced by {name}")


def forward(
    state: ModelState,
    batch: np.ndarray,
    mode: Mode = Mode.EVAL,
    rng: Optional[np.random.Generator] = None,
    logits: bool = False,
) -> np.ndarray:
    """Run the model on a batch and record the pass for ``backward``.

    Args:
        state: Compiled model with weights
        batch: ``N x H x W x C`` array matching the model's input shape
        mode: ``Mode.TRAIN`` enables dropout and requires ``rng``
        rng: Generator for dropout masks
        logits: Stop before the output activation (sigmoid / softmax)

    Returns:
        Head output: probabilities, or pre-activation scores when ``logits`` is set

    Examples:
        >>> from sdds_lab.models import HeadKind, HeadSpec, ModelSpec, ConvBlockSpec
        >>> from sdds_lab.engine.init import init_weights
        >>> spec = ModelSpec(backbone=[ConvBlockSpec(channels=2)],
        ...                  head=HeadSpec(kind=HeadKind.BINARY), input_shape=(8, 8, 1))
        >>> state = init_weights(spec, seed=0)
        >>> forward(state, np.zeros((3, 8, 8, 1))).shape
        (3, 1)
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 4 or tuple(batch.shape[1:]) != tuple(state.spec.input_shape):
        raise ShapeMismatchError(
            f"batch shape {batch.shape} does not match input shape {state.spec.input_shape}"
        )
    train = mode == Mode.TRAIN
    if train and rng is None:
        raise ValueError("train mode needs an rng")

    layers = [LayerRegistry.create(spec) for spec in state.layers]
    if logits and layers and layers[-1].kind in _OUTPUT_ACTIVATIONS:
        layers = layers[:-1]
    skip_sources = {layer.spec.skip_from for layer in layers if layer.spec.skip_from}

    x = batch
    saved: dict[str, np.ndarray] = {}
    records: list[tuple[Layer, Any]] = []
    for layer in layers:
        if layer.arity == 2:
            source = layer.spec.skip_from or ""
            if source not in saved:
                raise ValueError(f"{layer.name}: skip source '{source}' not computed yet")
            inputs: tuple[np.ndarray, ...] = (x, saved[source])
        else:
            inputs = (x,)
        x, cache = layer.forward(_layer_params(state, layer), inputs, train, rng)
        _check_finite(layer.name, x)
        if layer.name in skip_sources:
            saved[layer.name] = x
        records.append((layer, cache))

    state.tape = Tape(
        records=records,
        input_shape=tuple(batch.shape),
        output_shape=tuple(x.shape),
        mode=mode,
    )
    return x


def backward(state: ModelState, loss_grad: np.ndarray, store: bool = True) -> Gradients:
    """Backpropagate ``loss_grad`` through the recorded forward pass.

    Args:
        state: Model whose last forward pass is recorded on ``state.tape``
        loss_grad: Gradient of the loss w.r.t. the forward output
        store: Write parameter gradients into each ``Parameter.grad``

    Returns:
        Parameter gradients by tensor name plus the gradient w.r.t. the input batch

    Examples:
        >>> from sdds_lab.models import HeadKind, HeadSpec, ModelSpec
        >>> from sdds_lab.engine.init import init_weights
        >>> state = init_weights(ModelSpec(head=HeadSpec(kind=HeadKind.BINARY),
        ...                                input_shape=(4, 4, 1)), seed=0)
        >>> backward(state, np.ones((1, 1)))
        Traceback (most recent call last):
        ...
        sdds_lab.engine.errors.BackwardBeforeForwardError: backward called before forward
    """
    tape = state.tape
    if not isinstance(tape, Tape):
        raise BackwardBeforeForwardError("backward called before forward")
    grad = np.asarray(loss_grad, dtype=np.float64)
    if tuple(grad.shape) != tape.output_shape:
        raise ShapeMismatchError(
            f"loss gradient shape {grad.shape} does not match output {tape.output_shape}"
        )

    param_grads: dict[str, np.ndarray] = {}
    pending: dict[str, np.ndarray] = {}
    for layer, cache in reversed(tape.records):
        if layer.name in pending:
            grad = grad + pending.pop(layer.name)
        input_grads, layer_grads = layer.backward(_layer_params(state, layer), cache, grad)
        for suffix, value in layer_grads.items():
            param_grads[f"{layer.name}.{suffix}"] = value
        if layer.arity == 2:
            grad, skip_grad = input_grads
            source = layer.spec.skip_from or ""
            pending[source] = pending[source] + skip_grad if source in pending else skip_grad
        else:
            (grad,) = input_grads
        _check_finite(f"gradient of {layer.name}", grad)

    if store:
        for name, value in param_grads.items():
            state.params[name].grad = value
    state.tape = None
    logger.debug(f"Backward pass computed {len(param_grads)} parameter gradients")
    return Gradients(params=param_grads, input=grad)


def predict(state: ModelState, images: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """Eval-mode forward over ``images`` in chunks; leaves no tape behind."""
    outputs = []
    for start in range(0, len(images), batch_size):
        outputs.append(forward(state, images[start : start + batch_size], Mode.EVAL))
    state.tape = None
    if not outputs:
        raise ValueError("predict needs at least one image")
    return np.concatenate(outputs, axis=0)
