"""
Layer specifications and their runtime implementations.

Tensors are float64 numpy arrays. Sequence layers use the layout
(batch, length, channels).
"""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from floodlab.utils.exceptions import ConfigError, ShapeError

Shape = Tuple[int, ...]


class Activation(str, Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function, stable for large |x|."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def activations(x: np.ndarray, kind: Union[Activation, str]) -> np.ndarray:
    kind = Activation(kind)
    if kind is Activation.RELU:
        return relu(x)
    return sigmoid(x)


def activation_grad(z: np.ndarray, out: np.ndarray, grad: np.ndarray, kind: Activation) -> np.ndarray:
    """Chain grad (w.r.t. the activation output) back to the pre-activation z."""
    if kind is Activation.RELU:
        return grad * (z > 0)
    return grad * out * (1.0 - out)


"""
specifications
"""


@dataclass(frozen=True)
class DenseSpec:
    in_features: int
    out_features: int
    activation: Optional[Activation] = None

    def __post_init__(self):
        if self.in_features < 1 or self.out_features < 1:
            raise ConfigError(f"dense sizes must be positive, got {self.in_features}x{self.out_features}")
        if self.activation is not None:
            object.__setattr__(self, "activation", Activation(self.activation))


@dataclass(frozen=True)
class Conv1DSpec:
    in_channels: int
    filters: int
    kernel: int
    padding: str = "same"
    stride: int = 1
    activation: Optional[Activation] = None

    def __post_init__(self):
        if self.kernel < 1:
            raise ConfigError(f"kernel must be at least 1, got {self.kernel}")
        if self.filters < 1 or self.in_channels < 1:
            raise ConfigError("filters and in_channels must be at least 1")
        if self.padding != "same" or self.stride != 1:
            raise ConfigError("only stride 1 SAME convolution is supported")
        if self.activation is not None:
            object.__setattr__(self, "activation", Activation(self.activation))


@dataclass(frozen=True)
class MaxPool1DSpec:
    pool: int = 2
    stride: int = 2

    def __post_init__(self):
        if self.pool < 1 or self.stride != self.pool:
            raise ConfigError("max pooling needs pool >= 1 and stride equal to pool")


@dataclass(frozen=True)
class DropoutSpec:
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ConfigError(f"dropout rate must be in [0, 1), got {self.rate}")


@dataclass(frozen=True)
class FlattenSpec:
    pass


LayerSpec = Union[DenseSpec, Conv1DSpec, MaxPool1DSpec, DropoutSpec, FlattenSpec]

_SPEC_TYPES = {
    "dense": DenseSpec,
    "conv1d": Conv1DSpec,
    "maxpool1d": MaxPool1DSpec,
    "dropout": DropoutSpec,
    "flatten": FlattenSpec,
}


def spec_to_dict(spec: LayerSpec) -> Dict[str, Any]:
    name = next(k for k, v in _SPEC_TYPES.items() if isinstance(spec, v))
    values = asdict(spec)
    if values.get("activation") is not None:
        values["activation"] = Activation(values["activation"]).value
    return {"type": name, **values}


def spec_from_dict(values: Dict[str, Any]) -> LayerSpec:
    values = dict(values)
    try:
        cls = _SPEC_TYPES[values.pop("type")]
    except KeyError:
        raise ConfigError(f"unknown layer specification {values}") from None
    return cls(**values)


"""
runtime layers
"""


class Layer:
    """
    forward(..., cache=True) keeps what backward needs on the layer; any other
    forward pass leaves the layer untouched. backward fills self.grads.
    """

    def __init__(self, spec: LayerSpec):
        self.spec = spec
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}

    def output_shape(self, input_shape: Shape) -> Shape:
        return input_shape

    def forward(
        self,
        x: np.ndarray,
        training: bool = False,
        rng: Optional[np.random.Generator] = None,
        cache: bool = False,
    ) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Dense(Layer):
    def __init__(self, spec: DenseSpec):
        super().__init__(spec)
        self.params = {
            "W": np.zeros((spec.in_features, spec.out_features)),
            "b": np.zeros(spec.out_features),
        }

    def output_shape(self, input_shape: Shape) -> Shape:
        if tuple(input_shape) != (self.spec.in_features,):
            raise ShapeError(f"dense layer expects ({self.spec.in_features},), got {tuple(input_shape)}")
        return (self.spec.out_features,)

    def forward(self, x, training=False, rng=None, cache=False):
        if x.ndim != 2 or x.shape[1] != self.spec.in_features:
            raise ShapeError(f"dense layer expects (batch, {self.spec.in_features}), got {x.shape}")
        z = x @ self.params["W"] + self.params["b"]
        out = z if self.spec.activation is None else activations(z, self.spec.activation)
        if cache:
            self.x, self.z, self.out = x, z, out
        return out

    def backward(self, grad):
        if self.spec.activation is not None:
            grad = activation_grad(self.z, self.out, grad, self.spec.activation)
        self.grads = {"W": self.x.T @ grad, "b": grad.sum(axis=0)}
        return grad @ self.params["W"].T


def dense_forward(
    x: np.ndarray, W: np.ndarray, b: np.ndarray, activation: Optional[Activation] = None
) -> np.ndarray:
    """y = xW + b, then the activation if given."""
    if x.ndim != 2 or W.ndim != 2 or x.shape[1] != W.shape[0] or b.shape != (W.shape[1],):
        raise ShapeError(f"cannot multiply {x.shape} by {W.shape} with bias {b.shape}")
    y = x @ W + b
    return y if activation is None else activations(y, activation)


def same_padding(kernel: int) -> Tuple[int, int]:
    total = kernel - 1
    return total // 2, total - total // 2


class Conv1D(Layer):
    def __init__(self, spec: Conv1DSpec):
        super().__init__(spec)
        self.params = {
            "W": np.zeros((spec.kernel, spec.in_channels, spec.filters)),
            "b": np.zeros(spec.filters),
        }

    def output_shape(self, input_shape: Shape) -> Shape:
        if len(input_shape) != 2 or input_shape[1] != self.spec.in_channels:
            raise ShapeError(
                f"conv1d expects (length, {self.spec.in_channels}), got {tuple(input_shape)}"
            )
        return (input_shape[0], self.spec.filters)

    def forward(self, x, training=False, rng=None, cache=False):
        if x.ndim != 3 or x.shape[2] != self.spec.in_channels:
            raise ShapeError(f"conv1d expects (batch, length, {self.spec.in_channels}), got {x.shape}")
        left, right = same_padding(self.spec.kernel)
        padded = np.pad(x, ((0, 0), (left, right), (0, 0)))
        # (batch, length, channels, kernel) -> (batch, length, kernel, channels)
        cols = sliding_window_view(padded, self.spec.kernel, axis=1).transpose(0, 1, 3, 2)
        z = np.einsum("blkc,kcf->blf", cols, self.params["W"]) + self.params["b"]
        out = z if self.spec.activation is None else activations(z, self.spec.activation)
        if cache:
            self.cols, self.length, self.z, self.out = cols, x.shape[1], z, out
        return out

    def backward(self, grad):
        if self.spec.activation is not None:
            grad = activation_grad(self.z, self.out, grad, self.spec.activation)
        self.grads = {
            "W": np.einsum("blkc,blf->kcf", self.cols, grad),
            "b": grad.sum(axis=(0, 1)),
        }
        dcols = np.einsum("blf,kcf->blkc", grad, self.params["W"])
        kernel = self.spec.kernel
        left, _ = same_padding(kernel)
        batch, length = grad.shape[0], self.length
        dpadded = np.zeros((batch, length + kernel - 1, self.spec.in_channels))
        for k in range(kernel):
            dpadded[:, k : k + length, :] += dcols[:, :, k, :]
        return dpadded[:, left : left + length, :]


def conv1d_forward(
    x: np.ndarray, kernels: np.ndarray, b: np.ndarray, activation: Optional[Activation] = None
) -> np.ndarray:
    """Stride 1 SAME convolution of (batch, length, in_ch) with (kernel, in_ch, filters)."""
    if kernels.ndim != 3 or b.shape != (kernels.shape[2],):
        raise ShapeError(f"bad kernel {kernels.shape} or bias {b.shape}")
    kernel, in_channels, filters = kernels.shape
    layer = Conv1D(Conv1DSpec(in_channels, filters, kernel, activation=activation))
    layer.params = {"W": kernels, "b": b}
    return layer.forward(x)


class MaxPool1D(Layer):
    def output_shape(self, input_shape: Shape) -> Shape:
        length, channels = input_shape
        return (-(-length // self.spec.pool), channels)

    def forward(self, x, training=False, rng=None, cache=False):
        if x.ndim != 3 or x.shape[1] < 1:
            raise ShapeError(f"max pooling expects (batch, length >= 1, channels), got {x.shape}")
        pool = self.spec.pool
        batch, length, channels = x.shape
        windows = -(-length // pool)
        # the tail window is shorter; pad it with -inf
        padded = np.full((batch, windows * pool, channels), -np.inf)
        padded[:, :length, :] = x
        grouped = padded.reshape(batch, windows, pool, channels)
        argmax = grouped.argmax(axis=2)
        if cache:
            self.argmax, self.length = argmax, length
        return np.take_along_axis(grouped, argmax[:, :, None, :], axis=2)[:, :, 0, :]

    def backward(self, grad):
        pool = self.spec.pool
        batch, windows, channels = grad.shape
        dgrouped = np.zeros((batch, windows, pool, channels))
        np.put_along_axis(dgrouped, self.argmax[:, :, None, :], grad[:, :, None, :], axis=2)
        return dgrouped.reshape(batch, windows * pool, channels)[:, : self.length, :]


def maxpool1d_forward(x: np.ndarray, pool: int = 2) -> np.ndarray:
    return MaxPool1D(MaxPool1DSpec(pool, pool)).forward(x)


class Dropout(Layer):
    """
    Inverted dropout: survivors are scaled by 1 / (1 - rate) while training,
    inference is the identity.

    Without an rng a training pass reuses the cached mask.
    """

    def __init__(self, spec: DropoutSpec):
        super().__init__(spec)
        self.mask: Optional[np.ndarray] = None

    def forward(self, x, training=False, rng=None, cache=False):
        rate = self.spec.rate
        if not training or rate == 0.0:
            if cache:
                self.mask = None
            return x
        if rng is not None:
            mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
        elif self.mask is not None and self.mask.shape == x.shape:
            mask = self.mask
        else:
            raise ShapeError("dropout needs an rng or a cached mask of the same shape")
        if cache:
            self.mask = mask
        return x * mask

    def backward(self, grad):
        if self.mask is None:
            return grad
        return grad * self.mask


def dropout_forward(
    x: np.ndarray, rate: float, rng: Optional[np.random.Generator], training: bool
) -> np.ndarray:
    return Dropout(DropoutSpec(rate)).forward(x, training, rng)


class Flatten(Layer):
    def output_shape(self, input_shape: Shape) -> Shape:
        return (int(np.prod(input_shape)),)

    def forward(self, x, training=False, rng=None, cache=False):
        if cache:
            self.input_shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self.input_shape)


_LAYERS = {
    DenseSpec: Dense,
    Conv1DSpec: Conv1D,
    MaxPool1DSpec: MaxPool1D,
    DropoutSpec: Dropout,
    FlattenSpec: Flatten,
}


def make_layer(spec: LayerSpec) -> Layer:
    return _LAYERS[type(spec)](spec)
