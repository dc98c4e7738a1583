"""Exceptions raised by the numerical engine."""


class ShapeMismatchError(ValueError):
    """A tensor does not have the shape an operation requires."""


class NonFiniteError(FloatingPointError):
    """An activation, loss or gradient became NaN or infinite."""


class BackwardBeforeForwardError(RuntimeError):
    """``backward`` was called without a recorded forward pass."""


class MissingGradientError(RuntimeError):
    """An optimizer step found a parameter without a gradient."""


class WeightFileError(ValueError):
    """A weight container is malformed or incompatible with its spec."""
