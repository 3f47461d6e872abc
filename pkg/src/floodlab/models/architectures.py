"""
The two detector architectures, parameterised by input feature count.
"""

from enum import Enum
from typing import Union

from floodlab.nn.layers import (
    Activation,
    Conv1DSpec,
    DenseSpec,
    DropoutSpec,
    FlattenSpec,
    MaxPool1DSpec,
)
from floodlab.nn.model import Model
from floodlab.utils.exceptions import ConfigError

# (filters, kernel) of the three convolution blocks
CNN_CONV_BLOCKS = ((64, 8), (32, 16), (16, 3))
CNN_POOL = 2
CNN_DROPOUT = 0.5
CNN_DENSE_UNITS = 64

FNN_HIDDEN_UNITS = (64, 32)


class ArchName(str, Enum):
    CNN = "cnn"
    FNN = "fnn"

    @property
    def display(self) -> str:
        return self.value.upper()


def _check_features(n_features: int) -> None:
    if int(n_features) < 1:
        raise ConfigError(f"a model needs at least one input feature, got {n_features}")


def build_cnn(n_features: int, seed: int = 0) -> Model:
    """
    1D CNN over the feature vector read as a one-channel sequence.

    Three SAME convolutions, each followed by a max pool, then dropout,
    flatten, a ReLU dense layer and a sigmoid output unit.

    Args:
        n_features (int): Length of the input sequence.
        seed (int): Weight initialisation seed.

    Returns:
        Model: The untrained model.
    """
    _check_features(n_features)
    specs = []
    in_channels = 1
    length = int(n_features)
    for filters, kernel in CNN_CONV_BLOCKS:
        specs.append(Conv1DSpec(in_channels, filters, kernel, activation=Activation.RELU))
        specs.append(MaxPool1DSpec(CNN_POOL, CNN_POOL))
        in_channels = filters
        length = -(-length // CNN_POOL)
    specs.append(DropoutSpec(CNN_DROPOUT))
    specs.append(FlattenSpec())
    specs.append(DenseSpec(length * in_channels, CNN_DENSE_UNITS, Activation.RELU))
    specs.append(DenseSpec(CNN_DENSE_UNITS, 1, Activation.SIGMOID))
    return Model(specs, (int(n_features), 1), seed=seed, name=ArchName.CNN.display)


def build_fnn(n_features: int, seed: int = 0) -> Model:
    """Fully connected 64 ReLU, 32 ReLU, 1 sigmoid."""
    _check_features(n_features)
    specs = []
    width = int(n_features)
    for units in FNN_HIDDEN_UNITS:
        specs.append(DenseSpec(width, units, Activation.RELU))
        width = units
    specs.append(DenseSpec(width, 1, Activation.SIGMOID))
    return Model(specs, (int(n_features),), seed=seed, name=ArchName.FNN.display)


_BUILDERS = {ArchName.CNN: build_cnn, ArchName.FNN: build_fnn}


def build_model(name: Union[ArchName, str], n_features: int, seed: int = 0) -> Model:
    try:
        arch = ArchName(str(name).lower()) if not isinstance(name, ArchName) else name
    except ValueError:
        raise ConfigError(
            f"unknown model {name!r}, choose from {', '.join(a.value for a in ArchName)}"
        ) from None
    return _BUILDERS[arch](n_features, seed)
