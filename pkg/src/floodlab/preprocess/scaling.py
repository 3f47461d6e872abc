"""
Min-Max scaling fit on training rows.
"""

from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from floodlab.preprocess.matrix import DatasetMatrix
from floodlab.utils.exceptions import DataError, ShapeError


@dataclass
class ScalerParams:
    min: np.ndarray
    max: np.ndarray
    feature_names: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "feature_names": list(self.feature_names),
            "min": [float(v) for v in self.min],
            "max": [float(v) for v in self.max],
        }

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "ScalerParams":
        return cls(
            np.asarray(values["min"], dtype=np.float64),
            np.asarray(values["max"], dtype=np.float64),
            list(values["feature_names"]),
        )


def fit_minmax(train: DatasetMatrix) -> ScalerParams:
    """
    Per-feature extrema over the training rows.

    Raises:
        DataError: train has no rows.
    """
    if len(train) == 0:
        raise DataError("cannot fit a scaler on an empty matrix")
    return ScalerParams(
        train.features.min(axis=0), train.features.max(axis=0), list(train.feature_names)
    )


def apply_minmax(p: ScalerParams, m: DatasetMatrix) -> DatasetMatrix:
    """
    x' = (x - min) / (max - min), clamped to [0, 1]; constant features map to 0.

    Raises:
        ShapeError: m has a different number of features than p.
    """
    if m.n_features != len(p.min):
        raise ShapeError(f"scaler has {len(p.min)} features, matrix has {m.n_features}")
    span = p.max - p.min
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (m.features - p.min) / safe, 0.0)
    scaled = np.clip(scaled, 0.0, 1.0)
    return DatasetMatrix(scaled, m.labels.copy(), list(m.feature_names), m.codebooks)
