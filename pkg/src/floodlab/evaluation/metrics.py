"""
Confusion matrix, detection metrics and the per-model report.

The positive class is DDoS (label 1).
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from floodlab.utils.exceptions import DataError, FloodlabError, ShapeError

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "false_alarm_rate")

REPORT_HEADER = ("Model", "Accuracy", "Precision", "Recall", "F1 Score")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise DataError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self) -> Dict[str, int]:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


def _binary(values, what: str) -> np.ndarray:
    array = np.asarray(values).reshape(-1)
    if array.size and not np.isin(array, (0, 1)).all():
        raise DataError(f"{what} must contain only 0 and 1")
    return array.astype(np.int64)


def confusion(labels: Sequence[int], preds: Sequence[int]) -> ConfusionMatrix:
    """
    Count the four outcomes of a binary classifier.

    Raises:
        ShapeError: labels and preds differ in length.
        DataError: Empty input or values other than 0 and 1.
    """
    y = _binary(labels, "labels")
    p = _binary(preds, "predictions")
    if y.size != p.size:
        raise ShapeError(f"{y.size} labels but {p.size} predictions")
    if y.size == 0:
        raise DataError("cannot build a confusion matrix from no examples")
    return ConfusionMatrix(
        tp=int(np.sum((y == 1) & (p == 1))),
        tn=int(np.sum((y == 0) & (p == 0))),
        fp=int(np.sum((y == 0) & (p == 1))),
        fn=int(np.sum((y == 1) & (p == 0))),
    )


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    false_alarm_rate: float
    # metrics whose denominator was zero and which were reported as 0
    undefined: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def detection_rate(self) -> float:
        return self.recall

    def to_dict(self) -> Dict[str, Any]:
        values: Dict[str, Any] = {name: getattr(self, name) for name in METRIC_NAMES}
        values["undefined"] = list(self.undefined)
        return values

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "MetricsReport":
        return cls(
            **{name: float(values[name]) for name in METRIC_NAMES},
            undefined=tuple(values.get("undefined", ())),
        )


def _ratio(num: float, den: float, name: str, undefined: List[str]) -> float:
    if den == 0:
        undefined.append(name)
        return 0.0
    return num / den


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """
    Accuracy, precision, recall (detection rate), F1 and false-alarm rate.

    A ratio with a zero denominator is 0 and its name is listed in
    MetricsReport.undefined.
    """
    undefined: List[str] = []
    accuracy = _ratio(cm.tp + cm.tn, cm.total, "accuracy", undefined)
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", undefined)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", undefined)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", undefined)
    false_alarm = _ratio(cm.fp, cm.fp + cm.tn, "false_alarm_rate", undefined)
    return MetricsReport(accuracy, precision, recall, f1, false_alarm, tuple(undefined))


@dataclass
class ModelReport:
    """One evaluated model: its confusion counts and metrics."""

    model: str
    cm: ConfusionMatrix
    scores: MetricsReport

    @classmethod
    def of(cls, model: str, cm: ConfusionMatrix) -> "ModelReport":
        return cls(model, cm, metrics(cm))

    def row(self) -> List[str]:
        s = self.scores
        return [self.model] + [f"{100 * v:.2f}%" for v in (s.accuracy, s.precision, s.recall, s.f1)]

    def to_dict(self) -> Dict[str, Any]:
        return {"model": self.model, "confusion": self.cm.to_dict(), "metrics": self.scores.to_dict()}

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "ModelReport":
        return cls(
            values["model"],
            ConfusionMatrix(**values["confusion"]),
            MetricsReport.from_dict(values["metrics"]),
        )


@dataclass
class Report:
    models: List[ModelReport]

    def rows(self) -> List[List[str]]:
        return [m.row() for m in self.models]

    def table(self) -> str:
        """Space separated rows, e.g. "CNN 100.00% 100.00% 100.00% 100.00%"."""
        return "\n".join(" ".join(r) for r in [list(REPORT_HEADER)] + self.rows())

    def tsv(self) -> str:
        lines = ["\t".join(REPORT_HEADER + ("False Alarm Rate",))]
        for m in self.models:
            lines.append("\t".join(m.row() + [f"{100 * m.scores.false_alarm_rate:.2f}%"]))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> Dict[str, Any]:
        return {"models": [m.to_dict() for m in self.models]}

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "Report":
        return cls([ModelReport.from_dict(m) for m in values["models"]])

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "Report":
        """Read a metrics.json written by floodlab eval."""
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise FloodlabError(f"could not read metrics {path}: {e}") from e


def report(rows: Sequence[Tuple[str, ConfusionMatrix]]) -> Report:
    """
    Build the report for several models, keeping their order.

    Args:
        rows (Sequence[Tuple[str, ConfusionMatrix]]): (model name, confusion matrix) pairs.

    Returns:
        Report: Renders as a table, TSV or JSON-ready dict.
    """
    return Report([ModelReport.of(name, cm) for name, cm in rows])
