"""
Numeric dataset matrices: categorical encoding and the train/val/test split.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from floodlab.preprocess.table import RawTable
from floodlab.utils.constants import CATEGORICAL_COLUMNS, LABEL_COLUMN
from floodlab.utils.exceptions import ConfigError, DataError, SchemaError

Codebooks = Dict[str, Dict[str, int]]


@dataclass
class DatasetMatrix:
    features: np.ndarray
    labels: np.ndarray
    feature_names: List[str]
    codebooks: Codebooks = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {self.features.shape}")
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if self.features.shape[1] != len(self.feature_names):
            raise DataError("feature_names does not match the feature column count")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, rows: np.ndarray) -> "DatasetMatrix":
        return DatasetMatrix(
            self.features[rows], self.labels[rows], list(self.feature_names), self.codebooks
        )

    def class_counts(self) -> Dict[int, int]:
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.features, columns=self.feature_names)
        frame[LABEL_COLUMN] = self.labels
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, codebooks: Optional[Codebooks] = None) -> "DatasetMatrix":
        if LABEL_COLUMN not in frame.columns or frame.columns[-1] != LABEL_COLUMN:
            raise SchemaError("label must be the last column")
        names = [c for c in frame.columns if c != LABEL_COLUMN]
        return cls(
            frame[names].to_numpy(dtype=np.float64),
            frame[LABEL_COLUMN].to_numpy(dtype=np.int64),
            names,
            codebooks or {},
        )


def fit_codebooks(t: RawTable) -> Codebooks:
    """Integer codes in order of first appearance, per categorical column."""
    books = {}
    for column in CATEGORICAL_COLUMNS:
        if column in t.columns:
            values = pd.unique(t[column].astype(str))
            books[column] = {str(v): i for i, v in enumerate(values)}
    return books


def encode_categoricals(t: RawTable, codebooks: Optional[Codebooks] = None) -> DatasetMatrix:
    """
    Map text columns to integer codes; numeric columns pass through.

    Args:
        t (RawTable): Forward-filled table, label last.
        codebooks (Optional[Codebooks]): Existing codes; categories they lack become -1.
            Fit on t when omitted.

    Returns:
        DatasetMatrix: Unscaled features with the codebooks used.

    Raises:
        DataError: The table still contains nulls.
    """
    if t.isna().any().any():
        raise DataError("encode_categoricals needs a table without nulls, run forward_fill first")
    if LABEL_COLUMN not in t.columns:
        raise SchemaError("table has no label column")
    books = fit_codebooks(t) if codebooks is None else codebooks
    encoded = pd.DataFrame(index=t.index)
    for column in t.columns:
        if column == LABEL_COLUMN:
            continue
        if column in books:
            encoded[column] = t[column].astype(str).map(books[column]).fillna(-1).astype(np.float64)
        else:
            try:
                encoded[column] = pd.to_numeric(t[column]).astype(np.float64)
            except (ValueError, TypeError) as e:
                raise DataError(f"column {column} is neither categorical nor numeric") from e
    return DatasetMatrix(
        encoded.to_numpy(dtype=np.float64),
        t[LABEL_COLUMN].to_numpy(dtype=np.int64),
        list(encoded.columns),
        books,
    )


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.70
    val_frac: float = 0.10
    test_frac: float = 0.20
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f < 0 for f in fracs):
            raise ConfigError(f"split fractions must be non-negative, got {fracs}")
        if not math.isclose(sum(fracs), 1.0, abs_tol=1e-9):
            raise ConfigError(f"split fractions must sum to 1, got {sum(fracs)}")

    def sizes(self, n: int) -> Tuple[int, int, int]:
        """floor(train n), floor(val n) and the rest, using exact decimal fractions."""
        n_train = math.floor(Fraction(str(self.train_frac)) * n)
        n_val = math.floor(Fraction(str(self.val_frac)) * n)
        return n_train, n_val, n - n_train - n_val


MIN_SPLIT_ROWS = 10


def split(m: DatasetMatrix, spec: SplitSpec) -> Tuple[DatasetMatrix, DatasetMatrix, DatasetMatrix]:
    """
    Shuffle rows with a seeded permutation and cut train, val and test.

    Raises:
        DataError: Fewer than ten rows.
    """
    n = len(m)
    if n < MIN_SPLIT_ROWS:
        raise DataError(f"need at least {MIN_SPLIT_ROWS} rows to split, got {n}")
    n_train, n_val, _ = spec.sizes(n)
    order = np.random.default_rng(spec.seed).permutation(n)
    return (
        m.take(order[:n_train]),
        m.take(order[n_train : n_train + n_val]),
        m.take(order[n_train + n_val :]),
    )
