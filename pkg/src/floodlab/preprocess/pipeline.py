"""
The whole preprocessing chain and its on-disk artifacts.
"""

import json
from pathlib import Path
from typing import Tuple, Union

import pandas as pd
from loguru import logger

from floodlab.preprocess.matrix import DatasetMatrix, SplitSpec, encode_categoricals, split
from floodlab.preprocess.scaling import ScalerParams, apply_minmax, fit_minmax
from floodlab.preprocess.table import RawTable, drop_sparse_columns, forward_fill
from floodlab.utils.constants import CODEBOOKS_JSON, SCALER_JSON, TEST_CSV, TRAIN_CSV, VAL_CSV
from floodlab.utils.exceptions import FloodlabError, SchemaError


def preprocess_table(
    table: RawTable, spec: SplitSpec
) -> Tuple[DatasetMatrix, DatasetMatrix, DatasetMatrix, ScalerParams]:
    """
    Drop, fill, encode, split and scale a merged result table.

    Codebooks are fit on the whole encoded table; the scaler on train only.

    Args:
        table (RawTable): Merged telemetry table.
        spec (SplitSpec): Fractions and seed.

    Returns:
        Tuple[DatasetMatrix, DatasetMatrix, DatasetMatrix, ScalerParams]: train, val, test and the scaler.
    """
    reduced = drop_sparse_columns(table)
    filled = forward_fill(reduced)
    matrix = encode_categoricals(filled)
    logger.info(
        f"Encoded {len(matrix)} rows into {matrix.n_features} features: {', '.join(matrix.feature_names)}"
    )
    train, val, test = split(matrix, spec)
    scaler = fit_minmax(train)
    return (
        apply_minmax(scaler, train),
        apply_minmax(scaler, val),
        apply_minmax(scaler, test),
        scaler,
    )


def _write_matrix(m: DatasetMatrix, path: Path) -> None:
    m.to_frame().to_csv(path, index=False)


def write_splits(
    output: Union[str, Path],
    train: DatasetMatrix,
    val: DatasetMatrix,
    test: DatasetMatrix,
    scaler: ScalerParams,
) -> None:
    """Write train/val/test CSVs (label last), scaler.json and codebooks.json."""
    output = Path(output)
    try:
        _write_matrix(train, output / TRAIN_CSV)
        _write_matrix(val, output / VAL_CSV)
        _write_matrix(test, output / TEST_CSV)
        with open(output / SCALER_JSON, "w") as f:
            json.dump(scaler.to_dict(), f, indent=2)
        with open(output / CODEBOOKS_JSON, "w") as f:
            json.dump(train.codebooks, f, indent=2)
    except OSError as e:
        raise FloodlabError(f"could not write splits to {output}: {e}") from e


def read_split(path: Union[str, Path]) -> DatasetMatrix:
    """Read one of train.csv, val.csv or test.csv."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FloodlabError(f"could not read {path}: {e}") from e
    try:
        return DatasetMatrix.from_frame(frame)
    except SchemaError as e:
        raise SchemaError(f"{path}: {e}") from e
