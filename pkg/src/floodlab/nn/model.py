"""
Sequential model: parameter initialisation, forward, backprop, inference and
JSON serialisation.
"""

import base64
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from floodlab.nn.layers import (
    Conv1D,
    Dense,
    Layer,
    LayerSpec,
    Shape,
    make_layer,
    spec_from_dict,
    spec_to_dict,
)
from floodlab.nn.losses import bce_loss
from floodlab.utils.exceptions import FloodlabError, ShapeError

Gradients = Dict[str, np.ndarray]

MODEL_FORMAT = "floodlab-model"


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


class Model:
    """
    An ordered stack of layers.

    Args:
        specs (Sequence[LayerSpec]): Layer specifications, first to last.
        input_shape (Shape): Shape of one example, e.g. (6,) or (6, 1).
        seed (int): Seed for the Glorot uniform weight draw; biases start at zero.
        name (str): Architecture name used in reports.
    """

    def __init__(self, specs: Sequence[LayerSpec], input_shape: Shape, seed: int = 0, name: str = "model"):
        self.specs = list(specs)
        self.input_shape = tuple(int(d) for d in input_shape)
        self.name = name
        self.layers: List[Layer] = [make_layer(spec) for spec in self.specs]
        self.infer_shapes(self.input_shape)
        self._init_parameters(np.random.default_rng(seed))

    def _init_parameters(self, rng: np.random.Generator) -> None:
        for layer in self.layers:
            if isinstance(layer, Dense):
                fan_in, fan_out = layer.spec.in_features, layer.spec.out_features
            elif isinstance(layer, Conv1D):
                fan_in = layer.spec.kernel * layer.spec.in_channels
                fan_out = layer.spec.kernel * layer.spec.filters
            else:
                continue
            bound = glorot_bound(fan_in, fan_out)
            W = layer.params["W"]
            W[...] = rng.uniform(-bound, bound, size=W.shape)
            layer.params["b"][...] = 0.0

    def infer_shapes(self, input_shape: Optional[Shape] = None) -> List[Shape]:
        """
        Output shape of every layer, batch dimension excluded.

        Raises:
            ShapeError: Adjacent layers do not compose.
        """
        shape = tuple(input_shape or self.input_shape)
        shapes = []
        for index, layer in enumerate(self.layers):
            try:
                shape = tuple(layer.output_shape(shape))
            except ShapeError as e:
                raise ShapeError(f"layer {index} ({type(layer).__name__}): {e}") from e
            shapes.append(shape)
        return shapes

    @property
    def output_shape(self) -> Shape:
        return self.infer_shapes()[-1]

    def parameters(self) -> Dict[str, np.ndarray]:
        """Parameter arrays keyed "<layer index>.<name>"; the arrays are the live ones."""
        return {
            f"{i}.{name}": array
            for i, layer in enumerate(self.layers)
            for name, array in layer.params.items()
        }

    def parameter_count(self) -> int:
        return int(sum(array.size for array in self.parameters().values()))

    def _reshape_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        try:
            return x.reshape((x.shape[0],) + self.input_shape)
        except (ValueError, IndexError) as e:
            raise ShapeError(f"input {x.shape} does not fit example shape {self.input_shape}") from e

    def forward(
        self,
        x: np.ndarray,
        training: bool = False,
        rng: Optional[np.random.Generator] = None,
        cache: Optional[bool] = None,
    ) -> np.ndarray:
        """
        Output of shape (batch,) + output_shape. Dropout only acts when training.

        The layers keep what backward() needs only when cache is set, which it
        is by default for training passes. Any other pass leaves the model
        untouched, so concurrent inference on a shared model is safe.
        """
        cache = training if cache is None else cache
        out = self._reshape_input(x)
        for layer in self.layers:
            out = layer.forward(out, training, rng, cache)
        return out

    def backward(self, grad: np.ndarray) -> Gradients:
        """Reverse pass after a caching forward(); returns parameter gradients."""
        grads: Gradients = {}
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            grad = layer.backward(grad)
            for name, g in layer.grads.items():
                grads[f"{i}.{name}"] = g
        return grads

    def loss_and_gradients(
        self, x: np.ndarray, y: np.ndarray, rng: Optional[np.random.Generator] = None
    ) -> Tuple[float, Gradients]:
        """Training forward pass, BCE loss and backprop. Without an rng dropout reuses its last mask."""
        pred = self.forward(x, training=True, rng=rng)
        loss, grad = bce_loss(pred, y)
        return loss, self.backward(grad)

    def predict(self, x: np.ndarray, batch_size: int = 4096) -> np.ndarray:
        """Probabilities of the positive class, shape (batch,)."""
        x = np.asarray(x, dtype=np.float64)
        chunks = [
            self.forward(x[start : start + batch_size]).reshape(-1)
            for start in range(0, x.shape[0], batch_size)
        ]
        return np.concatenate(chunks) if chunks else np.zeros(0)

    def to_dict(self) -> Dict[str, Any]:
        parameters = {}
        for key, array in self.parameters().items():
            blob = np.ascontiguousarray(array, dtype="<f8").tobytes()
            parameters[key] = {
                "shape": list(array.shape),
                "data": base64.b64encode(blob).decode("ascii"),
            }
        return {
            "format": MODEL_FORMAT,
            "name": self.name,
            "input_shape": list(self.input_shape),
            "layers": [spec_to_dict(spec) for spec in self.specs],
            "parameters": parameters,
        }

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "Model":
        if values.get("format") != MODEL_FORMAT:
            raise FloodlabError("not a floodlab model document")
        specs = [spec_from_dict(spec) for spec in values["layers"]]
        model = cls(specs, tuple(values["input_shape"]), name=values.get("name", "model"))
        live = model.parameters()
        for key, entry in values["parameters"].items():
            if key not in live:
                raise ShapeError(f"unexpected parameter {key}")
            data = np.frombuffer(base64.b64decode(entry["data"]), dtype="<f8")
            array = data.reshape(entry["shape"])
            if array.shape != live[key].shape:
                raise ShapeError(f"parameter {key} has shape {array.shape}, expected {live[key].shape}")
            live[key][...] = array
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Model":
        try:
            return cls.from_dict(json.loads(text))
        except (ValueError, KeyError) as e:
            if isinstance(e, FloodlabError):
                raise
            raise FloodlabError(f"not a valid model document: {e}") from e

    def save(self, path: Union[str, Path]) -> None:
        try:
            with open(path, "w") as f:
                f.write(self.to_json())
        except OSError as e:
            raise FloodlabError(f"could not write model {path}: {e}") from e

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Model":
        try:
            with open(path) as f:
                text = f.read()
        except OSError as e:
            raise FloodlabError(f"could not read model {path}: {e}") from e
        return cls.from_json(text)


def backprop(
    model: Model, batch_x: np.ndarray, batch_y: np.ndarray, rng: Optional[np.random.Generator] = None
) -> Gradients:
    """Gradients of the mean BCE loss for every parameter of the model."""
    _, grads = model.loss_and_gradients(batch_x, batch_y, rng)
    return grads


def predict(model: Model, x: np.ndarray) -> np.ndarray:
    return model.predict(x)


def classify(p: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """1 where p >= threshold, else 0."""
    return (np.asarray(p) >= threshold).astype(np.int64)
