from floodlab.preprocess.matrix import DatasetMatrix, SplitSpec, encode_categoricals, split
from floodlab.preprocess.pipeline import preprocess_table, read_split, write_splits
from floodlab.preprocess.scaling import ScalerParams, apply_minmax, fit_minmax
from floodlab.preprocess.table import (
    drop_sparse_columns,
    forward_fill,
    read_raw_table,
    read_records,
)

__all__ = [
    "DatasetMatrix",
    "ScalerParams",
    "SplitSpec",
    "apply_minmax",
    "drop_sparse_columns",
    "encode_categoricals",
    "fit_minmax",
    "forward_fill",
    "preprocess_table",
    "read_raw_table",
    "read_records",
    "read_split",
    "split",
    "write_splits",
]
