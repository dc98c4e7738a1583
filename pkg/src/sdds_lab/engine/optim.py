"""SGD and Adam parameter updates."""

import logging
from dataclasses import dataclass, field

import numpy as np

from sdds_lab.engine.errors import MissingGradientError, ShapeMismatchError
from sdds_lab.models import ModelState, OptimizerKind

logger = logging.getLogger(__name__)


@dataclass
class OptimizerState:
    """Optimizer hyperparameters plus Adam's per-parameter moment buffers.

    Examples:
        >>> opt = OptimizerState(kind=OptimizerKind.ADAM, learning_rate=1e-3)
        >>> opt.step_count, opt.beta1, opt.beta2
        (0, 0.9, 0.999)
    """

    kind: OptimizerKind
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)


def step(optimizer: OptimizerState, state: ModelState) -> ModelState:
    """Apply one update to every parameter and clear the gradients.

    Args:
        optimizer: Optimizer state, updated in place
        state: Model whose parameters all carry a gradient

    Returns:
        The updated model state

    Examples:
        >>> from sdds_lab.models import Parameter
        >>> state = ModelState(spec=None, layers=[], params={"w": Parameter(np.array([1.0]))})
        >>> state.params["w"].grad = np.array([2.0])
        >>> step(OptimizerState(kind=OptimizerKind.SGD, learning_rate=0.1), state).params["w"].value
        array([0.8])
        >>> state.params["w"].grad is None
        True
    """
    missing = [name for name, p in state.params.items() if p.grad is None]
    if missing:
        raise MissingGradientError(f"no gradient for {', '.join(missing)}")

    optimizer.step_count += 1
    t = optimizer.step_count
    for name, param in state.params.items():
        grad = param.grad
        assert grad is not None
        if grad.shape != param.value.shape:
            raise ShapeMismatchError(f"gradient of {name} has shape {grad.shape}")
        if optimizer.kind == OptimizerKind.SGD:
            param.value = param.value - optimizer.learning_rate * grad
        elif optimizer.kind == OptimizerKind.ADAM:
            m = optimizer.first_moment.get(name)
            v = optimizer.second_moment.get(name)
            if m is None or v is None:
                m, v = np.zeros_like(param.value), np.zeros_like(param.value)
            elif m.shape != param.value.shape:
                raise ShapeMismatchError(f"moment buffer of {name} has shape {m.shape}")
            m = optimizer.beta1 * m + (1.0 - optimizer.beta1) * grad
            v = optimizer.beta2 * v + (1.0 - optimizer.beta2) * grad * grad
            optimizer.first_moment[name] = m
            optimizer.second_moment[name] = v
            m_hat = m / (1.0 - optimizer.beta1**t)
            v_hat = v / (1.0 - optimizer.beta2**t)
            param.value = param.value - optimizer.learning_rate * m_hat / (
                np.sqrt(v_hat) + optimizer.epsilon
            )
        else:
            raise ValueError(f"Unknown optimizer kind: {optimizer.kind}")
        param.grad = None
    return state


def zero_grad(state: ModelState) -> None:
    for param in state.params.values():
        param.grad = None
