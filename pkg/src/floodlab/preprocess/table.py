"""
Raw result tables: import, column drop and forward fill.
"""

from pathlib import Path
from typing import List, Union

import pandas as pd
from loguru import logger

from floodlab.telemetry.records import StatRecord
from floodlab.utils.constants import (
    CATEGORICAL_COLUMNS,
    CSV_COLUMNS,
    LABEL_COLUMN,
    SPARSE_COLUMNS,
)
from floodlab.utils.exceptions import FloodlabError, SchemaError

# a RawTable is a DataFrame with unique column names
RawTable = pd.DataFrame

_INT_FIELDS = ("count", "underflows", "overflows", "label")
_STR_FIELDS = ("type", "module", "name", "attrname", "attrvalue", "binedges", "binvalues")


def read_raw_table(path: Union[str, Path]) -> RawTable:
    """
    Read a result CSV; empty fields become nulls.

    Args:
        path (Union[str, Path]): CSV with the schema header.

    Returns:
        RawTable: One row per record.
    """
    try:
        table = pd.read_csv(
            path,
            float_precision="round_trip",
            dtype={c: "string" for c in _STR_FIELDS},
        )
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FloodlabError(f"could not read {path}: {e}") from e
    if table.columns.duplicated().any():
        raise SchemaError(f"{path} has duplicate column names")
    # back to plain object columns with None for nulls
    for column in _STR_FIELDS:
        if column in table.columns:
            table[column] = table[column].astype(object).where(table[column].notna(), None)
    logger.debug(f"Read {len(table)} rows from {path}")
    return table


def check_schema(table: RawTable, source: str = "table") -> None:
    if list(table.columns) != list(CSV_COLUMNS):
        raise SchemaError(
            f"{source} columns {list(table.columns)} do not match the expected {list(CSV_COLUMNS)}"
        )


def _none_if_null(value):
    if value is None or (not isinstance(value, str) and pd.isna(value)):
        return None
    return value


def read_records(path: Union[str, Path]) -> List[StatRecord]:
    """
    Import a telemetry CSV back into StatRecords.

    Raises:
        SchemaError: The header is not the telemetry schema.
    """
    table = read_raw_table(path)
    check_schema(table, str(path))
    records = []
    for row in table.itertuples(index=False, name=None):
        values = dict(zip(CSV_COLUMNS, (_none_if_null(v) for v in row)))
        for column in _INT_FIELDS:
            if values[column] is not None:
                values[column] = int(values[column])
        for column in ("sumweights", "value", "mean", "stddev", "min", "max"):
            if values[column] is not None:
                values[column] = float(values[column])
        records.append(StatRecord(**values))
    return records


def drop_sparse_columns(t: RawTable) -> RawTable:
    """
    Remove the ten histogram-only columns.

    Args:
        t (RawTable): Table with every schema column and the label.

    Returns:
        RawTable: type, module, name, attrname, attrvalue, value and label.

    Raises:
        SchemaError: An expected column is missing.
    """
    missing = [c for c in CSV_COLUMNS if c not in t.columns]
    if missing:
        raise SchemaError(f"table is missing columns {missing}")
    return t.drop(columns=list(SPARSE_COLUMNS))


def forward_fill(t: RawTable) -> RawTable:
    """
    Replace each null by the nearest non-null value above it.

    Leading nulls take the column's first non-null value; a column with no
    values at all becomes 0, or "" for text columns.
    """
    filled = t.ffill().bfill()
    for column in filled.columns:
        if column == LABEL_COLUMN:
            continue
        if filled[column].isna().all():
            textual = column in CATEGORICAL_COLUMNS or filled[column].dtype == object
            filled[column] = "" if textual else 0
    return filled
