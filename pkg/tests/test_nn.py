"""
Unit tests for the numpy neural network layers, backprop, ADAM and training

Usage: pytest tests/test_nn.py

"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from floodlab.models.architectures import build_cnn, build_fnn
from floodlab.nn.gradcheck import check_layer, numerical_gradient, relative_error
from floodlab.nn.layers import (
    Activation,
    Conv1DSpec,
    DenseSpec,
    DropoutSpec,
    FlattenSpec,
    MaxPool1DSpec,
    conv1d_forward,
    dense_forward,
    dropout_forward,
    make_layer,
    maxpool1d_forward,
    relu,
    sigmoid,
    spec_from_dict,
    spec_to_dict,
)
from floodlab.nn.losses import bce_loss
from floodlab.nn.model import Model, backprop, classify, predict
from floodlab.nn.optim import AdamState, adam_step
from floodlab.nn.training import History, TrainConfig, evaluate_loss, train
from floodlab.preprocess.matrix import DatasetMatrix
from floodlab.utils.exceptions import ConfigError, FloodlabError, ShapeError, TrainingError

GRAD_TOL = 1e-4


def randomised(spec, rng):
    layer = make_layer(spec)
    for array in layer.params.values():
        array[...] = rng.standard_normal(array.shape)
    return layer


def separable(n, seed):
    """Two features; the label is 1 when the first is above 0.5, with a margin."""
    rng = np.random.default_rng(seed)
    x0 = np.where(rng.random(n) < 0.5, rng.uniform(0.0, 0.4, n), rng.uniform(0.6, 1.0, n))
    features = np.column_stack([x0, rng.random(n)])
    return DatasetMatrix(features, (x0 > 0.5).astype(int), ["a", "b"])


class TestOps:
    def test_dense(self):
        x = np.array([[1.0, 2.0]])
        W = np.array([[1.0, -1.0], [0.5, 2.0]])
        b = np.array([0.5, -4.0])
        assert dense_forward(x, W, b).tolist() == [[2.5, -1.0]]
        assert dense_forward(x, W, b, Activation.RELU).tolist() == [[2.5, 0.0]]

    def test_dense_shape_mismatch(self):
        with pytest.raises(ShapeError):
            dense_forward(np.ones((1, 3)), np.ones((2, 2)), np.zeros(2))

    def test_conv_same_padding(self):
        # kernel [1, 1, 1] over [1, 2, 3, 4] with one zero on each side
        x = np.array([1.0, 2.0, 3.0, 4.0]).reshape(1, 4, 1)
        out = conv1d_forward(x, np.ones((3, 1, 1)), np.zeros(1))
        assert out.reshape(-1).tolist() == [3.0, 6.0, 9.0, 7.0]

    def test_conv_even_kernel_pads_right(self):
        x = np.array([1.0, 2.0, 3.0]).reshape(1, 3, 1)
        out = conv1d_forward(x, np.ones((2, 1, 1)), np.zeros(1))
        assert out.shape == (1, 3, 1)
        assert out.reshape(-1).tolist() == [3.0, 5.0, 3.0]

    def test_maxpool_odd_length(self):
        x = np.array([1.0, 5.0, 2.0, -1.0, 3.0]).reshape(1, 5, 1)
        assert maxpool1d_forward(x, 2).reshape(-1).tolist() == [5.0, 2.0, 3.0]

    def test_maxpool_length_one(self):
        assert maxpool1d_forward(np.array([[[7.0, -2.0]]]), 2).tolist() == [[[7.0, -2.0]]]

    def test_activations(self):
        assert relu(np.array([-1.0, 0.0, 2.0])).tolist() == [0.0, 0.0, 2.0]
        assert sigmoid(np.array([0.0]))[0] == 0.5
        extremes = sigmoid(np.array([-1000.0, 1000.0]))
        assert np.all(np.isfinite(extremes))
        assert extremes[0] == pytest.approx(0.0) and extremes[1] == pytest.approx(1.0)

    def test_dropout(self):
        x = np.ones((50, 40))
        assert dropout_forward(x, 0.5, np.random.default_rng(0), training=False) is x
        out = dropout_forward(x, 0.5, np.random.default_rng(0), training=True)
        assert set(np.unique(out).tolist()) <= {0.0, 2.0}
        assert 0.4 < np.mean(out == 0.0) < 0.6

    @pytest.mark.parametrize("rate", [0.2, 0.5])
    def test_dropout_keeps_expectation(self, rate):
        x = np.full(100_000, 3.0)
        out = dropout_forward(x, rate, np.random.default_rng(11), training=True)
        assert abs(np.mean(out != 0.0) - (1.0 - rate)) <= 0.01
        assert np.mean(out) == pytest.approx(3.0, rel=0.02)

    def test_sigmoid_saturates(self):
        out = sigmoid(np.array([-500.0, 500.0]))
        assert np.all(np.isfinite(out))
        assert 0.0 <= out[0] < 1e-200
        assert out[1] == 1.0

    def test_bce(self):
        loss, grad = bce_loss(np.array([0.5, 0.5]), np.array([0, 1]))
        assert loss == pytest.approx(math.log(2))
        assert grad.tolist() == pytest.approx([1.0, -1.0])

    def test_bce_clamps(self):
        loss, _ = bce_loss(np.array([0.0, 1.0]), np.array([1, 0]))
        assert math.isfinite(loss)
        assert loss == pytest.approx(-math.log(1e-7))

    def test_bce_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        pred = rng.uniform(0.05, 0.95, 12)
        y = rng.integers(0, 2, 12)
        _, analytic = bce_loss(pred, y)
        numeric = numerical_gradient(lambda p: bce_loss(p, y)[0], pred)
        assert relative_error(analytic, numeric) < 1e-6

    def test_bad_specs(self):
        with pytest.raises(ConfigError):
            Conv1DSpec(1, 4, 0)
        with pytest.raises(ConfigError):
            DropoutSpec(1.0)
        with pytest.raises(ConfigError):
            DenseSpec(0, 3)

    def test_spec_dict(self):
        spec = Conv1DSpec(1, 64, 8, activation=Activation.RELU)
        values = spec_to_dict(spec)
        assert values["type"] == "conv1d" and values["activation"] == "relu"
        assert spec_from_dict(values) == spec


GRADIENT_CASES = [
    ("dense", DenseSpec(4, 3), (5, 4)),
    ("dense relu", DenseSpec(4, 3, Activation.RELU), (5, 4)),
    ("dense sigmoid", DenseSpec(4, 3, Activation.SIGMOID), (5, 4)),
    ("dense one unit", DenseSpec(6, 1, Activation.SIGMOID), (3, 6)),
    ("dense one input", DenseSpec(1, 5, Activation.RELU), (4, 1)),
    ("dense wide", DenseSpec(16, 8), (2, 16)),
    ("conv k1", Conv1DSpec(1, 3, 1), (2, 6, 1)),
    ("conv k2", Conv1DSpec(2, 3, 2), (2, 5, 2)),
    ("conv k3", Conv1DSpec(1, 4, 3, activation=Activation.RELU), (2, 6, 1)),
    ("conv k4", Conv1DSpec(3, 2, 4), (2, 5, 3)),
    ("conv k8 long kernel", Conv1DSpec(1, 2, 8, activation=Activation.RELU), (2, 6, 1)),
    ("conv k16 on short input", Conv1DSpec(2, 2, 16), (1, 3, 2)),
    ("conv sigmoid", Conv1DSpec(2, 3, 3, activation=Activation.SIGMOID), (3, 4, 2)),
    ("conv length one", Conv1DSpec(4, 2, 3), (2, 1, 4)),
    ("pool even", MaxPool1DSpec(2, 2), (2, 6, 3)),
    ("pool odd", MaxPool1DSpec(2, 2), (2, 5, 3)),
    ("pool three", MaxPool1DSpec(3, 3), (2, 7, 2)),
    ("pool length one", MaxPool1DSpec(2, 2), (3, 1, 2)),
    ("flatten", FlattenSpec(), (3, 4, 2)),
    ("dropout inference", DropoutSpec(0.5), (4, 6)),
]


class TestGradients:
    @pytest.mark.parametrize("name, spec, shape", GRADIENT_CASES, ids=[c[0] for c in GRADIENT_CASES])
    def test_layer_gradients(self, name, spec, shape):
        rng = np.random.default_rng(len(name))
        layer = randomised(spec, rng)
        errors = check_layer(layer, rng.standard_normal(shape), rng)
        for key, error in errors.items():
            assert error < GRAD_TOL, f"{name}: {key} relative error {error}"

    @pytest.mark.parametrize("rate", [0.2, 0.5])
    def test_dropout_training_gradients(self, rate):
        rng = np.random.default_rng(3)
        layer = make_layer(DropoutSpec(rate))
        errors = check_layer(layer, rng.standard_normal((4, 5, 2)), rng, training=True)
        assert errors["x"] < GRAD_TOL

    def test_numerical_gradient_restores_input(self):
        x = np.array([1.0, 2.0, 3.0])
        grad = numerical_gradient(lambda v: float(np.sum(v**2)), x)
        assert x.tolist() == [1.0, 2.0, 3.0]
        assert grad == pytest.approx([2.0, 4.0, 6.0], rel=1e-6)

    def test_relative_error_of_zeros(self):
        assert relative_error(np.zeros(3), np.zeros(3)) == 0.0

    def test_model_gradients(self):
        specs = [
            Conv1DSpec(1, 4, 3, activation=Activation.RELU),
            MaxPool1DSpec(2, 2),
            DropoutSpec(0.5),
            FlattenSpec(),
            DenseSpec(12, 5, Activation.RELU),
            DenseSpec(5, 1, Activation.SIGMOID),
        ]
        model = Model(specs, (5, 1), seed=4)
        rng = np.random.default_rng(4)
        x = rng.standard_normal((6, 5))
        y = np.array([0, 1, 1, 0, 1, 0])
        grads = backprop(model, x, y, rng)

        def loss(_):
            return bce_loss(model.forward(x, training=True, rng=None), y)[0]

        for key, param in model.parameters().items():
            assert relative_error(grads[key], numerical_gradient(loss, param)) < GRAD_TOL, key

    def test_backprop_covers_every_parameter(self):
        model = build_cnn(6, seed=1)
        x = np.random.default_rng(0).random((8, 6))
        grads = backprop(model, x, np.array([0, 1] * 4), np.random.default_rng(0))
        params = model.parameters()
        assert set(grads) == set(params)
        for key in params:
            assert grads[key].shape == params[key].shape
            assert np.all(np.isfinite(grads[key]))

    def test_batch_gradient_is_mean_of_example_gradients(self):
        model = build_fnn(3, seed=6)
        rng = np.random.default_rng(6)
        x = rng.standard_normal((8, 3))
        y = np.array([0, 1, 1, 0, 0, 1, 0, 1])
        batch = backprop(model, x, y)
        singles = [backprop(model, x[i : i + 1], y[i : i + 1]) for i in range(len(y))]
        for key, g in batch.items():
            mean = np.mean([s[key] for s in singles], axis=0)
            assert np.allclose(g, mean, rtol=1e-10, atol=1e-12), key

    def test_zero_input_gives_zero_first_layer_weight_gradient(self):
        model = build_fnn(4, seed=2)
        grads = backprop(model, np.zeros((5, 4)), np.array([0, 1, 0, 1, 1]))
        assert not grads["0.W"].any()


class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        params = {"w": np.array([1.0, -2.0, 0.5])}
        grads = {"w": np.array([0.5, -3.0, 0.0])}
        adam_step(params, grads, AdamState(), 1, TrainConfig())
        assert params["w"] == pytest.approx([0.999, -1.999, 0.5], abs=1e-9)

    def test_state_accumulates(self):
        params = {"w": np.array([1.0])}
        state = AdamState()
        cfg = TrainConfig(learning_rate=0.1)
        for t in range(1, 4):
            adam_step(params, {"w": np.array([2.0])}, state, t, cfg)
        assert state.t == 3
        assert params["w"][0] == pytest.approx(0.7, abs=1e-6)

    def test_step_number(self):
        with pytest.raises(ConfigError):
            adam_step({"w": np.zeros(1)}, {"w": np.zeros(1)}, AdamState(), 0, TrainConfig())


class TestModel:
    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            Model([DenseSpec(3, 2), DenseSpec(4, 1)], (3,))

    def test_predict_and_classify(self):
        model = build_fnn(3, seed=2)
        x = np.random.default_rng(1).random((10, 3))
        p = predict(model, x)
        assert p.shape == (10,)
        assert np.all((p > 0) & (p < 1))
        assert classify(np.array([0.2, 0.5, 0.7])).tolist() == [0, 1, 1]
        assert classify(np.array([0.2, 0.5, 0.7]), 0.6).tolist() == [0, 0, 1]

    def test_inference_ignores_dropout(self):
        model = build_cnn(6, seed=2)
        x = np.random.default_rng(1).random((5, 6))
        assert np.array_equal(model.predict(x), model.predict(x))

    def test_seeded_initialisation(self):
        a, b, c = build_fnn(4, seed=1), build_fnn(4, seed=1), build_fnn(4, seed=2)
        assert all(np.array_equal(a.parameters()[k], b.parameters()[k]) for k in a.parameters())
        assert not np.array_equal(a.parameters()["0.W"], c.parameters()["0.W"])
        assert not a.parameters()["0.b"].any()

    @pytest.mark.parametrize("builder", [build_fnn, build_cnn])
    def test_zeroed_output_layer_predicts_half(self, builder):
        model = builder(6, seed=1)
        for array in model.layers[-1].params.values():
            array[...] = 0.0
        p = model.predict(np.random.default_rng(2).random((7, 6)))
        assert p.tolist() == [0.5] * 7

    def test_predict_leaves_layers_untouched(self):
        model = build_cnn(6, seed=4)
        before = [set(vars(layer)) for layer in model.layers]
        model.predict(np.random.default_rng(0).random((9, 6)))
        assert [set(vars(layer)) for layer in model.layers] == before

    def test_concurrent_predict_matches_serial(self):
        model = build_cnn(6, seed=5)
        x = np.random.default_rng(5).random((64, 6))
        sizes = [1 + (7 * i) % 64 for i in range(32)]
        serial = [model.predict(x[:n]) for n in sizes]
        with ThreadPoolExecutor(max_workers=32) as pool:
            concurrent = list(pool.map(lambda n: model.predict(x[:n], batch_size=5), sizes))
        for n, expected, got in zip(sizes, serial, concurrent):
            assert got.shape == (n,)
            assert np.array_equal(got, expected)

    def test_json(self, tmp_path):
        model = build_cnn(6, seed=3)
        x = np.random.default_rng(0).random((4, 6))
        path = tmp_path / "cnn_model.json"
        model.save(path)
        loaded = Model.load(path)
        assert loaded.name == "CNN"
        assert np.array_equal(loaded.predict(x), model.predict(x))

    def test_bad_json(self, tmp_path):
        with pytest.raises(FloodlabError):
            Model.from_json("{}")
        with pytest.raises(FloodlabError):
            Model.from_json("not json")
        with pytest.raises(FloodlabError):
            Model.load(tmp_path / "missing.json")


class TestTraining:
    def test_learns_separable_data(self):
        data = separable(200, seed=0)
        model = build_fnn(2, seed=0)
        cfg = TrainConfig(epochs=30, learning_rate=0.01, batch_size=4, seed=0)
        history = train(model, data, separable(100, seed=1), cfg)
        assert len(history.epochs) == 30
        assert history.train_loss[-1] < history.train_loss[0]
        assert history.epochs[-1].val_accuracy >= 0.95

    def test_separable_reaches_full_training_accuracy(self):
        # label is the sign of the first feature, with a gap around zero
        rng = np.random.default_rng(3)
        x0 = np.where(rng.random(400) < 0.5, rng.uniform(-1.0, -0.3, 400), rng.uniform(0.3, 1.0, 400))
        features = np.column_stack([x0, rng.uniform(-1.0, 1.0, 400)])
        data = DatasetMatrix(features, (x0 > 0).astype(int), ["a", "b"])
        model = build_fnn(2, seed=0)
        train(model, data, None, TrainConfig(epochs=10, learning_rate=0.01, batch_size=8, seed=0))
        assert evaluate_loss(model, data.features, data.labels, 0.5)["accuracy"] >= 0.99

    def test_constant_labels(self):
        rng = np.random.default_rng(0)
        data = DatasetMatrix(rng.random((64, 3)), np.zeros(64, dtype=int), ["a", "b", "c"])
        history = train(build_fnn(3, seed=0), data, None, TrainConfig(epochs=10, batch_size=16))
        losses = history.train_loss
        assert all(later < earlier for earlier, later in zip(losses, losses[1:]))
        assert math.isnan(history.epochs[0].val_loss)

    def test_deterministic(self):
        data = separable(60, seed=2)
        cfg = TrainConfig(epochs=3, batch_size=8, seed=5)
        first, second = build_cnn(2, seed=1), build_cnn(2, seed=1)
        h1 = train(first, data, None, cfg)
        h2 = train(second, data, None, cfg)
        assert h1.train_loss == h2.train_loss
        for key, value in first.parameters().items():
            assert np.array_equal(value, second.parameters()[key])

    def test_non_finite_loss(self):
        features = np.full((8, 2), np.nan)
        data = DatasetMatrix(features, np.zeros(8, dtype=int), ["a", "b"])
        with pytest.raises(TrainingError):
            train(build_fnn(2), data, None, TrainConfig(epochs=1))

    def test_empty_training_set(self):
        data = DatasetMatrix(np.zeros((0, 2)), np.zeros(0, dtype=int), ["a", "b"])
        with pytest.raises(TrainingError):
            train(build_fnn(2), data, None, TrainConfig(epochs=1))

    @pytest.mark.parametrize(
        "values",
        [{"epochs": 0}, {"learning_rate": 0.0}, {"batch_size": 0}, {"classification_threshold": 1.0}],
    )
    def test_bad_config(self, values):
        with pytest.raises(ConfigError):
            TrainConfig(**values)

    def test_unknown_config_key(self):
        with pytest.raises(ConfigError):
            TrainConfig.from_dict({"epoch": 3})

    def test_history_csv(self, tmp_path):
        history = train(build_fnn(2), separable(20, seed=0), separable(10, seed=1), TrainConfig(epochs=2))
        path = tmp_path / "fnn_history.csv"
        history.to_csv(path)
        back = History.from_csv(path)
        assert [e.epoch for e in back.epochs] == [1, 2]
        assert back.train_loss == pytest.approx(history.train_loss)
