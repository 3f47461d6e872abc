"""
Unit tests for the CNN and FNN detector architectures

Usage: pytest tests/test_models.py

"""

import numpy as np
import pytest

from floodlab.models.architectures import ArchName, build_cnn, build_fnn, build_model
from floodlab.nn.layers import Conv1DSpec, DenseSpec, DropoutSpec, FlattenSpec, MaxPool1DSpec
from floodlab.utils.exceptions import ConfigError


class TestCNN:
    def test_parameter_count(self):
        assert build_cnn(6).parameter_count() == 36081

    def test_shapes(self):
        shapes = build_cnn(6).infer_shapes()
        assert shapes[:6] == [(6, 64), (3, 64), (3, 32), (2, 32), (2, 16), (1, 16)]
        # dropout keeps the shape, flatten gives 16 units
        assert shapes[6:] == [(1, 16), (16,), (64,), (1,)]

    def test_layer_order(self):
        kinds = [type(spec) for spec in build_cnn(6).specs]
        assert kinds == [
            Conv1DSpec,
            MaxPool1DSpec,
            Conv1DSpec,
            MaxPool1DSpec,
            Conv1DSpec,
            MaxPool1DSpec,
            DropoutSpec,
            FlattenSpec,
            DenseSpec,
            DenseSpec,
        ]
        convs = [(s.filters, s.kernel) for s in build_cnn(6).specs if isinstance(s, Conv1DSpec)]
        assert convs == [(64, 8), (32, 16), (16, 3)]

    @pytest.mark.parametrize("n_features, flat", [(1, 16), (6, 16), (10, 32), (16, 32)])
    def test_flatten_width_follows_input(self, n_features, flat):
        assert build_cnn(n_features).infer_shapes()[7] == (flat,)

    def test_forward_shape(self):
        model = build_cnn(6, seed=0)
        assert model.forward(np.zeros((3, 6))).shape == (3, 1)


class TestFNN:
    @pytest.mark.parametrize("n_features, expected", [(6, 2561), (1, 2241)])
    def test_parameter_count(self, n_features, expected):
        assert build_fnn(n_features).parameter_count() == expected

    def test_layers(self):
        model = build_fnn(6)
        assert [(s.in_features, s.out_features) for s in model.specs] == [(6, 64), (64, 32), (32, 1)]
        assert model.name == "FNN"


class TestBuildModel:
    @pytest.mark.parametrize("name", ["cnn", "CNN", ArchName.CNN])
    def test_names(self, name):
        assert build_model(name, 6).name == "CNN"

    def test_unknown(self):
        with pytest.raises(ConfigError):
            build_model("rnn", 6)

    @pytest.mark.parametrize("builder", [build_cnn, build_fnn])
    def test_no_features(self, builder):
        with pytest.raises(ConfigError):
            builder(0)

    def test_display(self):
        assert [a.display for a in ArchName] == ["CNN", "FNN"]
