"""
Unit tests for the confusion matrix, detection metrics and reports

Usage: pytest tests/test_eval.py

"""

import json

import numpy as np
import pytest

from floodlab.evaluation.metrics import (
    ConfusionMatrix,
    MetricsReport,
    Report,
    confusion,
    metrics,
    report,
)
from floodlab.utils.exceptions import DataError, FloodlabError, ShapeError


class TestConfusion:
    def test_counts(self):
        cm = confusion([1, 1, 0, 0, 1, 0], [1, 0, 0, 1, 1, 0])
        assert cm == ConfusionMatrix(tp=2, tn=2, fp=1, fn=1)
        assert cm.total == 6

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            confusion([0, 1], [0])

    def test_empty(self):
        with pytest.raises(DataError):
            confusion([], [])

    def test_non_binary(self):
        with pytest.raises(DataError):
            confusion([0, 2], [0, 1])

    def test_negative_counts(self):
        with pytest.raises(DataError):
            ConfusionMatrix(-1, 0, 0, 0)

    def test_worked_example(self):
        labels = [1] * 50 + [0] * 40 + [0] * 5 + [1] * 5
        preds = [1] * 50 + [0] * 40 + [1] * 5 + [0] * 5
        cm = confusion(labels, preds)
        assert cm == ConfusionMatrix(tp=50, tn=40, fp=5, fn=5)
        assert metrics(cm).accuracy == pytest.approx(0.90)

    def test_matches_counting_by_hand(self):
        rng = np.random.default_rng(2)
        for _ in range(1000):
            n = int(rng.integers(1, 60))
            labels = rng.integers(0, 2, n).tolist()
            preds = rng.integers(0, 2, n).tolist()
            counts = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
            for y, p in zip(labels, preds):
                key = ("t" if y == p else "f") + ("p" if p == 1 else "n")
                counts[key] += 1
            cm = confusion(labels, preds)
            assert cm == ConfusionMatrix(**counts)
            assert cm.total == n
            scores = metrics(cm)
            assert abs(scores.accuracy - (1 - (cm.fp + cm.fn) / cm.total)) < 1e-12

    def test_perfect_predictions(self):
        y = np.random.default_rng(3).integers(0, 2, 200)
        cm = confusion(y, y)
        assert cm.fp == 0 and cm.fn == 0
        assert metrics(cm).accuracy == 1.0


class TestMetrics:
    def test_perfect(self):
        scores = metrics(ConfusionMatrix(tp=5, tn=5, fp=0, fn=0))
        assert (scores.accuracy, scores.precision, scores.recall, scores.f1) == (1.0, 1.0, 1.0, 1.0)
        assert scores.false_alarm_rate == 0.0
        assert scores.undefined == ()

    def test_example(self):
        scores = metrics(ConfusionMatrix(tp=8, tn=6, fp=2, fn=4))
        assert scores.accuracy == pytest.approx(0.7)
        assert scores.precision == pytest.approx(0.8)
        assert scores.recall == pytest.approx(8 / 12)
        assert scores.detection_rate == scores.recall
        assert scores.f1 == pytest.approx(2 * 0.8 * (8 / 12) / (0.8 + 8 / 12))
        assert scores.false_alarm_rate == pytest.approx(0.25)

    def test_no_positive_predictions(self):
        scores = metrics(confusion([1, 0, 0], [0, 0, 0]))
        assert scores.precision == 0.0
        assert scores.f1 == 0.0
        assert "precision" in scores.undefined
        assert "f1" in scores.undefined
        assert "recall" not in scores.undefined

    def test_only_benign(self):
        scores = metrics(confusion([0, 0], [0, 0]))
        assert scores.accuracy == 1.0
        assert scores.recall == 0.0
        assert set(scores.undefined) == {"precision", "recall", "f1"}

    def test_random_cases(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            tp, tn, fp, fn = (int(v) for v in rng.integers(1, 500, 4))
            scores = metrics(ConfusionMatrix(tp, tn, fp, fn))
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            assert abs(scores.accuracy - (tp + tn) / (tp + tn + fp + fn)) < 1e-12
            assert abs(scores.precision - precision) < 1e-12
            assert abs(scores.recall - recall) < 1e-12
            assert abs(scores.f1 - 2 * precision * recall / (precision + recall)) < 1e-12
            assert abs(scores.f1 - 2 * tp / (2 * tp + fp + fn)) < 1e-12
            assert abs(scores.false_alarm_rate - fp / (fp + tn)) < 1e-12

    def test_bounds(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            labels = rng.integers(0, 2, 50)
            preds = rng.integers(0, 2, 50)
            scores = metrics(confusion(labels, preds))
            for name in ("accuracy", "precision", "recall", "f1", "false_alarm_rate"):
                assert 0.0 <= getattr(scores, name) <= 1.0
            assert scores.f1 <= max(scores.precision, scores.recall) + 1e-12
            assert scores.f1 >= min(scores.precision, scores.recall) - 1e-12

    def test_dict(self):
        scores = metrics(ConfusionMatrix(1, 0, 0, 0))
        assert MetricsReport.from_dict(scores.to_dict()) == scores


class TestReport:
    def test_rows(self):
        result = report([("CNN", ConfusionMatrix(5, 5, 0, 0)), ("FNN", ConfusionMatrix(8, 6, 2, 4))])
        assert result.rows()[0] == ["CNN", "100.00%", "100.00%", "100.00%", "100.00%"]
        assert result.rows()[1][:3] == ["FNN", "70.00%", "80.00%"]
        lines = result.table().splitlines()
        assert lines[0] == "Model Accuracy Precision Recall F1 Score"
        assert lines[1] == "CNN 100.00% 100.00% 100.00% 100.00%"

    def test_tsv(self):
        result = report([("FNN", ConfusionMatrix(8, 6, 2, 4))])
        header, row = result.tsv().splitlines()
        assert header.split("\t")[-1] == "False Alarm Rate"
        assert row.split("\t")[-1] == "25.00%"

    def test_json(self, tmp_path):
        result = report([("CNN", ConfusionMatrix(5, 3, 1, 0))])
        path = tmp_path / "metrics.json"
        path.write_text(json.dumps(result.to_dict()))
        back = Report.from_json(path)
        assert back.models[0].cm == result.models[0].cm
        assert back.models[0].scores == result.models[0].scores

    def test_bad_json(self, tmp_path):
        path = tmp_path / "metrics.json"
        path.write_text("{}")
        with pytest.raises(FloodlabError):
            Report.from_json(path)
