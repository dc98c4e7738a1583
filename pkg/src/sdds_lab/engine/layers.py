"""Layer kernels and the layer registry.

Every layer is a stateless kernel over channels-last ``float64`` arrays
(``N x H x W x C`` for images, ``N x F`` for vectors). Weights live in the
model state and are passed in; the forward pass returns a cache that the
backward pass consumes.

Examples:
    >>> import numpy as np
    >>> from sdds_lab.models import LayerKind, LayerSpec
    >>> relu = LayerRegistry.create(LayerSpec(name="r", kind=LayerKind.RELU))
    >>> y, _ = relu.forward({}, (np.array([[-1.0, 0.0, 2.0]]),), train=False, rng=None)
    >>> y.tolist()
    [[0.0, 0.0, 2.0]]
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Optional

import numpy as np
from scipy.special import expit

from sdds_lab.engine.errors import ShapeMismatchError
from sdds_lab.models import LayerKind, LayerSpec

logger = logging.getLogger(__name__)

Arrays = tuple[np.ndarray, ...]


class Layer(ABC):
    """Base class for layer kernels.

    Subclasses declare ``kind`` and implement ``forward`` / ``backward``.
    Parameterized layers also implement ``initialize``.
    """

    kind: ClassVar[LayerKind]
    arity: ClassVar[int] = 1

    def __init__(self, spec: LayerSpec):
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.name

    def initialize(self, rng: np.random.Generator) -> dict[str, np.ndarray]:
        """Fresh weights keyed by suffix (``weight``, ``bias``); empty if unparameterized."""
        return {}

    @abstractmethod
    def forward(
        self,
        params: dict[str, np.ndarray],
        inputs: Arrays,
        train: bool,
        rng: Optional[np.random.Generator],
    ) -> tuple[np.ndarray, Any]:
        """Compute the layer output and the cache needed by ``backward``."""
        ...

    @abstractmethod
    def backward(
        self, params: dict[str, np.ndarray], cache: Any, grad: np.ndarray
    ) -> tuple[Arrays, dict[str, np.ndarray]]:
        """Return (gradients w.r.t. inputs, gradients w.r.t. parameters)."""
        ...

    def _expect_ndim(self, x: np.ndarray, ndim: int) -> None:
        if x.ndim != ndim:
            raise ShapeMismatchError(
                f"{self.name}: expected a {ndim}-d input, got shape {x.shape}"
            )


def he_uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    """He-uniform sample in ``[-sqrt(6 / fan_in), sqrt(6 / fan_in)]``.

    Examples:
        >>> w = he_uniform(np.random.default_rng(0), (3, 3, 1, 4), fan_in=9)
        >>> bool(np.all(np.abs(w) <= np.sqrt(6 / 9)))
        True
    """
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


class LayerRegistry:
    """Registry of layer kernels keyed by ``LayerKind``.

    Examples:
        >>> LayerRegistry.get(LayerKind.CONV2D).__name__
        'Conv2D'
        >>> len(LayerRegistry.list_kinds())
        10
    """

    _by_kind: dict[LayerKind, type[Layer]] = {}

    @classmethod
    def register(cls, layer_class: type[Layer]) -> type[Layer]:
        """Register a layer class. Can be used as a decorator."""
        cls._by_kind[layer_class.kind] = layer_class
        logger.debug(f"Registered layer: {layer_class.kind.value}")
        return layer_class

    @classmethod
    def get(cls, kind: LayerKind) -> type[Layer]:
        try:
            return cls._by_kind[kind]
        except KeyError:
            raise ValueError(f"No layer registered for kind '{kind}'") from None

    @classmethod
    def create(cls, spec: LayerSpec) -> Layer:
        return cls.get(spec.kind)(spec)

    @classmethod
    def list_kinds(cls) -> list[LayerKind]:
        return list(cls._by_kind)

    @classmethod
    def clear(cls) -> None:
        """Clear all registered layer kinds (for testing)."""
        cls._by_kind = {}


@LayerRegistry.register
class Conv2D(Layer):
    """2-D cross-correlation with zero padding; weight shape ``(k, k, C_in, C_out)``.

    The kernel loops over the ``k x k`` offsets and contracts each strided
    input window with the matching weight slice.

    Examples:
        >>> spec = LayerSpec(name="c", kind=LayerKind.CONV2D, in_channels=1, out_channels=1)
        >>> conv = Conv2D(spec)
        >>> params = {"weight": np.ones((3, 3, 1, 1)), "bias": np.zeros(1)}
        >>> y, _ = conv.forward(params, (np.ones((1, 4, 4, 1)),), train=False, rng=None)
        >>> y[0, :, :, 0].tolist()
        [[9.0, 9.0], [9.0, 9.0]]
    """

    kind = LayerKind.CONV2D

    def initialize(self, rng: np.random.Generator) -> dict[str, np.ndarray]:
        k = self.spec.kernel_size
        c_in = self.spec.in_channels or 1
        c_out = self.spec.out_channels or 1
        return {
            "weight": he_uniform(rng, (k, k, c_in, c_out), fan_in=k * k * c_in),
            "bias": np.zeros(c_out),
        }

    def output_size(self, size: int) -> int:
        return (size + 2 * self.spec.padding - self.spec.kernel_size) // self.spec.stride + 1

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        self._expect_ndim(x, 4)
        weight, bias = params["weight"], params["bias"]
        k, s, p = self.spec.kernel_size, self.spec.stride, self.spec.padding
        if x.shape[3] != weight.shape[2]:
            raise ShapeMismatchError(
                f"{self.name}: input has {x.shape[3]} channels, weight expects {weight.shape[2]}"
            )
        out_h, out_w = self.output_size(x.shape[1]), self.output_size(x.shape[2])
        if out_h < 1 or out_w < 1:
            raise ShapeMismatchError(f"{self.name}: input {x.shape[1:3]} smaller than kernel")
        padded = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))
        out = np.zeros((x.shape[0], out_h, out_w, weight.shape[3]))
        for i in range(k):
            for j in range(k):
                window = padded[:, i : i + s * out_h : s, j : j + s * out_w : s, :]
                out += window @ weight[i, j]
        out += bias
        return out, (padded, x.shape)

    def backward(self, params, cache, grad):
        padded, input_shape = cache
        weight = params["weight"]
        k, s, p = self.spec.kernel_size, self.spec.stride, self.spec.padding
        out_h, out_w = grad.shape[1], grad.shape[2]
        grad_weight = np.zeros_like(weight)
        grad_padded = np.zeros_like(padded)
        for i in range(k):
            for j in range(k):
                rows = slice(i, i + s * out_h, s)
                cols = slice(j, j + s * out_w, s)
                window = padded[:, rows, cols, :]
                grad_weight[i, j] = np.tensordot(window, grad, axes=([0, 1, 2], [0, 1, 2]))
                grad_padded[:, rows, cols, :] += grad @ weight[i, j].T
        height, width = input_shape[1], input_shape[2]
        grad_input = grad_padded[:, p : p + height, p : p + width, :]
        return (grad_input,), {"weight": grad_weight, "bias": grad.sum(axis=(0, 1, 2))}


@LayerRegistry.register
class MaxPool2D(Layer):
    """Non-overlapping ``size x size`` max pooling; trailing rows/columns are dropped.

    Examples:
        >>> pool = MaxPool2D(LayerSpec(name="p", kind=LayerKind.MAXPOOL2D))
        >>> x = np.arange(16, dtype=float).reshape(1, 4, 4, 1)
        >>> y, _ = pool.forward({}, (x,), train=False, rng=None)
        >>> y[0, :, :, 0].tolist()
        [[5.0, 7.0], [13.0, 15.0]]
    """

    kind = LayerKind.MAXPOOL2D

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        self._expect_ndim(x, 4)
        s = self.spec.size
        n, height, width, channels = x.shape
        out_h, out_w = height // s, width // s
        if out_h < 1 or out_w < 1:
            raise ShapeMismatchError(f"{self.name}: input {x.shape[1:3]} smaller than window")
        windows = (
            x[:, : out_h * s, : out_w * s, :]
            .reshape(n, out_h, s, out_w, s, channels)
            .transpose(0, 1, 3, 5, 2, 4)
            .reshape(n, out_h, out_w, channels, s * s)
        )
        index = np.argmax(windows, axis=-1)[..., None]
        out = np.take_along_axis(windows, index, axis=-1)[..., 0]
        return out, (index, x.shape)

    def backward(self, params, cache, grad):
        index, input_shape = cache
        s = self.spec.size
        n, height, width, channels = input_shape
        out_h, out_w = grad.shape[1], grad.shape[2]
        windows = np.zeros((n, out_h, out_w, channels, s * s))
        np.put_along_axis(windows, index, grad[..., None], axis=-1)
        unpooled = (
            windows.reshape(n, out_h, out_w, channels, s, s)
            .transpose(0, 1, 4, 2, 5, 3)
            .reshape(n, out_h * s, out_w * s, channels)
        )
        grad_input = np.zeros(input_shape)
        grad_input[:, : out_h * s, : out_w * s, :] = unpooled
        return (grad_input,), {}


@LayerRegistry.register
class GlobalAvgPool(Layer):
    kind = LayerKind.GLOBALAVGPOOL

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        self._expect_ndim(x, 4)
        return x.mean(axis=(1, 2)), x.shape

    def backward(self, params, cache, grad):
        n, height, width, channels = cache
        grad_input = np.broadcast_to(
            grad[:, None, None, :] / (height * width), (n, height, width, channels)
        ).copy()
        return (grad_input,), {}


@LayerRegistry.register
class Dense(Layer):
    """Affine map ``x @ W + b`` with ``W`` of shape ``(in, out)``."""

    kind = LayerKind.DENSE

    def initialize(self, rng: np.random.Generator) -> dict[str, np.ndarray]:
        fan_in = self.spec.in_channels or 1
        fan_out = self.spec.out_channels or 1
        return {
            "weight": he_uniform(rng, (fan_in, fan_out), fan_in=fan_in),
            "bias": np.zeros(fan_out),
        }

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        self._expect_ndim(x, 2)
        weight = params["weight"]
        if x.shape[1] != weight.shape[0]:
            raise ShapeMismatchError(
                f"{self.name}: input has {x.shape[1]} features, weight expects {weight.shape[0]}"
            )
        return x @ weight + params["bias"], x

    def backward(self, params, cache, grad):
        x = cache
        return (grad @ params["weight"].T,), {"weight": x.T @ grad, "bias": grad.sum(axis=0)}


@LayerRegistry.register
class ReLU(Layer):
    kind = LayerKind.RELU

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        active = x > 0
        return np.where(active, x, 0.0), active

    def backward(self, params, cache, grad):
        return (np.where(cache, grad, 0.0),), {}


@LayerRegistry.register
class Sigmoid(Layer):
    kind = LayerKind.SIGMOID

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        y = expit(x)
        return y, y

    def backward(self, params, cache, grad):
        y = cache
        return (grad * y * (1.0 - y),), {}


@LayerRegistry.register
class Softmax(Layer):
    """Softmax over the last (channel) axis."""

    kind = LayerKind.SOFTMAX

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        shifted = np.exp(x - x.max(axis=-1, keepdims=True))
        y = shifted / shifted.sum(axis=-1, keepdims=True)
        return y, y

    def backward(self, params, cache, grad):
        y = cache
        return (y * (grad - (grad * y).sum(axis=-1, keepdims=True)),), {}


@LayerRegistry.register
class Dropout(Layer):
    """Inverted dropout: kept units are scaled by ``1 / (1 - rate)`` while training.

    Examples:
        >>> drop = Dropout(LayerSpec(name="d", kind=LayerKind.DROPOUT, rate=0.5))
        >>> x = np.ones((2, 3))
        >>> y, _ = drop.forward({}, (x,), train=False, rng=None)
        >>> bool(np.array_equal(x, y))
        True
    """

    kind = LayerKind.DROPOUT

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        rate = self.spec.rate
        if not train or rate == 0.0:
            return x, None
        if rng is None:
            raise ValueError(f"{self.name}: train-mode dropout needs an rng")
        mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
        return x * mask, mask

    def backward(self, params, cache, grad):
        if cache is None:
            return (grad,), {}
        return (grad * cache,), {}


@LayerRegistry.register
class Upsample2D(Layer):
    """Nearest-neighbour upsampling by an integer factor."""

    kind = LayerKind.UPSAMPLE2D

    def forward(self, params, inputs, train, rng):
        (x,) = inputs
        self._expect_ndim(x, 4)
        s = self.spec.size
        return np.repeat(np.repeat(x, s, axis=1), s, axis=2), x.shape

    def backward(self, params, cache, grad):
        n, height, width, channels = cache
        s = self.spec.size
        grad_input = grad.reshape(n, height, s, width, s, channels).sum(axis=(2, 4))
        return (grad_input,), {}


@LayerRegistry.register
class ConcatSkip(Layer):
    """Concatenate the running activation with an earlier layer's output along channels."""

    kind = LayerKind.CONCAT_SKIP
    arity = 2

    def forward(self, params, inputs, train, rng):
        x, skip = inputs
        self._expect_ndim(x, 4)
        if x.shape[:3] != skip.shape[:3]:
            raise ShapeMismatchError(
                f"{self.name}: cannot concatenate {x.shape} with skip {skip.shape}"
            )
        return np.concatenate([x, skip], axis=-1), x.shape[3]

    def backward(self, params, cache, grad):
        split = cache
        return (grad[..., :split], grad[..., split:]), {}
