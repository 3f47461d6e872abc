from floodlab.nn.gradcheck import check_layer, numerical_gradient, relative_error
from floodlab.nn.layers import (
    Activation,
    Conv1DSpec,
    DenseSpec,
    DropoutSpec,
    FlattenSpec,
    MaxPool1DSpec,
    activations,
    conv1d_forward,
    dense_forward,
    dropout_forward,
    maxpool1d_forward,
)
from floodlab.nn.losses import bce_loss
from floodlab.nn.model import Model, backprop, classify, predict
from floodlab.nn.optim import AdamState, adam_step
from floodlab.nn.training import History, TrainConfig, train

__all__ = [
    "Activation",
    "AdamState",
    "Conv1DSpec",
    "DenseSpec",
    "DropoutSpec",
    "FlattenSpec",
    "History",
    "MaxPool1DSpec",
    "Model",
    "TrainConfig",
    "activations",
    "adam_step",
    "backprop",
    "bce_loss",
    "check_layer",
    "classify",
    "conv1d_forward",
    "dense_forward",
    "dropout_forward",
    "maxpool1d_forward",
    "numerical_gradient",
    "predict",
    "relative_error",
    "train",
]
