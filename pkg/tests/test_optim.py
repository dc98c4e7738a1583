"""Tests for SGD and Adam updates."""

import numpy as np
import pytest

from sdds_lab.engine.errors import MissingGradientError
from sdds_lab.engine.optim import OptimizerState, step, zero_grad
from sdds_lab.models import ModelState, OptimizerKind, Parameter


def _state(value, grad=None):
    state = ModelState(spec=None, layers=[], params={"w": Parameter(np.array(value, dtype=float))})  # type: ignore[arg-type]
    state.params["w"].grad = None if grad is None else np.array(grad, dtype=float)
    return state


def test_sgd_step():
    state = _state([1.0, -2.0], [0.5, 1.0])
    step(OptimizerState(kind=OptimizerKind.SGD, learning_rate=0.1), state)
    np.testing.assert_allclose(state.params["w"].value, [0.95, -2.1])


def test_adam_first_step_moves_by_learning_rate():
    """Bias correction makes the first Adam step lr * sign(grad)."""
    state = _state([0.0, 0.0], [3.0, -0.01])
    optimizer = OptimizerState(kind=OptimizerKind.ADAM, learning_rate=0.01)
    step(optimizer, state)
    np.testing.assert_allclose(state.params["w"].value, [-0.01, 0.01], rtol=1e-5)
    assert optimizer.step_count == 1


def test_adam_matches_reference_recurrence():
    optimizer = OptimizerState(kind=OptimizerKind.ADAM, learning_rate=0.1)
    state = _state([1.0])
    m = v = 0.0
    w = 1.0
    for t, g in enumerate([0.5, -0.2, 0.3], start=1):
        state.params["w"].grad = np.array([g])
        step(optimizer, state)
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        w -= 0.1 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
    assert state.params["w"].value[0] == pytest.approx(w, rel=1e-12)


def test_step_clears_gradients():
    state = _state([1.0], [1.0])
    step(OptimizerState(kind=OptimizerKind.SGD, learning_rate=0.1), state)
    assert state.params["w"].grad is None


def test_missing_gradient_raises():
    with pytest.raises(MissingGradientError, match="w"):
        step(OptimizerState(kind=OptimizerKind.SGD, learning_rate=0.1), _state([1.0]))


def test_zero_grad():
    state = _state([1.0], [2.0])
    zero_grad(state)
    assert state.params["w"].grad is None
