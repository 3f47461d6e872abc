#!/usr/bin/env python3

from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd
from loguru import logger

from floodlab.utils.constants import CSV_COLUMNS, DATASET_CSV, LABEL_COLUMN
from floodlab.utils.exceptions import FloodlabError, SchemaError

# classes further apart than this fraction get a warning
BALANCE_TOLERANCE = 0.10


def read_result_text(path: Union[str, Path]) -> pd.DataFrame:
    """A result CSV with every cell kept as its original text."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FloodlabError(f"could not read {path}: {e}") from e
    if list(frame.columns) != list(CSV_COLUMNS):
        raise SchemaError(f"{path} does not have the telemetry header {','.join(CSV_COLUMNS)}")
    return frame


def class_counts(frame: pd.DataFrame) -> Dict[int, int]:
    counts = frame[LABEL_COLUMN].astype(int).value_counts().sort_index()
    return {int(label): int(n) for label, n in counts.items()}


def merge_results(inputs: List[Path], seed: int) -> pd.DataFrame:
    """
    Concatenate result files in a seeded random file order.

    Records inside a file keep their order.

    Raises:
        SchemaError: A file does not have the telemetry header.
    """
    frames = [read_result_text(path) for path in inputs]
    order = np.random.default_rng(seed).permutation(len(frames))
    return pd.concat([frames[i] for i in order], ignore_index=True)


def subcommand_dataset(inputs: List[Path], output: Path, seed: int) -> Dict[int, int]:
    """
    Wrapper command for floodlab dataset. Merges result files into dataset.csv.

    Args:
        inputs (List[Path]): Result CSV files written by floodlab simulate.
        output (Path): Output directory path.
        seed (int): Seed of the file order shuffle.

    Returns:
        Dict[int, int]: Row count per class label.
    """
    logger.info(f"Merging {len(inputs)} result files")
    merged = merge_results(inputs, seed)
    dataset_path = Path(output) / DATASET_CSV
    merged.to_csv(dataset_path, index=False, lineterminator="\n")
    counts = class_counts(merged)
    logger.info(f"Wrote {len(merged)} records to {dataset_path}")
    for label, n in counts.items():
        logger.info(f"Class {label}: {n} records")

    if len(counts) < 2:
        logger.warning("The dataset contains a single class; both normal and ddos results are recommended")
    else:
        low, high = min(counts.values()), max(counts.values())
        if (high - low) > BALANCE_TOLERANCE * high:
            logger.warning(f"Classes are imbalanced: {counts}")
    return counts
