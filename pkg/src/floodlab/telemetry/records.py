"""
Result records in the 16 column scalar/histogram schema, plus the class label.
"""

import csv
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from floodlab.utils.constants import CSV_COLUMNS
from floodlab.utils.exceptions import FloodlabError, SchemaError

_HISTOGRAM_FIELDS = (
    "sumweights",
    "count",
    "mean",
    "stddev",
    "min",
    "max",
    "underflows",
    "overflows",
    "binedges",
    "binvalues",
)


@dataclass(frozen=True)
class StatRecord:
    sumweights: Optional[float]
    type: str
    module: str
    name: str
    attrname: Optional[str]
    attrvalue: Optional[str]
    value: Optional[float]
    count: Optional[int]
    mean: Optional[float]
    stddev: Optional[float]
    min: Optional[float]
    max: Optional[float]
    underflows: Optional[int]
    overflows: Optional[int]
    binedges: Optional[str]
    binvalues: Optional[str]
    label: int

    @classmethod
    def scalar(cls, module: str, name: str, value: float, label: int) -> "StatRecord":
        return cls(
            None, "scalar", module, name, None, None, float(value),
            None, None, None, None, None, None, None, None, None, label,
        )

    def validate(self) -> "StatRecord":
        """
        Check field presence and histogram consistency.

        Raises:
            SchemaError: The record breaks the scalar or histogram rules.
        """
        if self.type == "scalar":
            if self.value is None:
                raise SchemaError(f"scalar {self.module}.{self.name} has no value")
            present = [f for f in _HISTOGRAM_FIELDS if getattr(self, f) is not None]
            if present:
                raise SchemaError(f"scalar {self.module}.{self.name} carries {present}")
        elif self.type == "histogram":
            if self.value is not None:
                raise SchemaError(f"histogram {self.module}.{self.name} has a value")
            missing = [f for f in _HISTOGRAM_FIELDS if getattr(self, f) is None]
            if missing:
                raise SchemaError(f"histogram {self.module}.{self.name} lacks {missing}")
            bins = [int(v) for v in self.binvalues.split()]
            if self.count != sum(bins) + self.underflows + self.overflows:
                raise SchemaError(f"histogram {self.module}.{self.name} counts do not add up")
            edges = [float(e) for e in self.binedges.split()]
            if any(b <= a for a, b in zip(edges, edges[1:])):
                raise SchemaError(f"histogram {self.module}.{self.name} edges not increasing")
            if not (self.min <= self.mean <= self.max) or self.stddev < 0:
                raise SchemaError(f"histogram {self.module}.{self.name} moments out of order")
        else:
            raise SchemaError(f"unknown record type {self.type!r}")
        if self.label not in (0, 1):
            raise SchemaError(f"label must be 0 or 1, got {self.label}")
        return self


def _cell(value: Union[None, str, int, float]) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        # repr of a plain float round-trips exactly
        return repr(float(value))
    return str(value)


def export_csv(records: Sequence[StatRecord], path: Union[str, Path]) -> None:
    """
    Write records with the schema header; nulls become empty fields.

    Args:
        records (Sequence[StatRecord]): Non-empty list of records.
        path (Union[str, Path]): Destination CSV.

    Raises:
        FloodlabError: No records, or the file cannot be written.
    """
    if not records:
        raise FloodlabError(f"no records to write to {path}")
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for record in records:
                writer.writerow([_cell(v) for v in astuple(record)])
    except OSError as e:
        raise FloodlabError(f"could not write {path}: {e}") from e

