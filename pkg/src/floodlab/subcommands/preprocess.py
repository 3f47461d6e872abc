#!/usr/bin/env python3

from pathlib import Path

from loguru import logger

from floodlab.preprocess.matrix import SplitSpec
from floodlab.preprocess.pipeline import preprocess_table, write_splits
from floodlab.preprocess.scaling import ScalerParams
from floodlab.preprocess.table import check_schema, read_raw_table


def subcommand_preprocess(dataset: Path, output: Path, spec: SplitSpec) -> ScalerParams:
    """
    Wrapper command for floodlab preprocess. Turns dataset.csv into scaled train/val/test splits.

    Args:
        dataset (Path): Merged dataset CSV.
        output (Path): Output directory path.
        spec (SplitSpec): Split fractions and shuffle seed.

    Returns:
        ScalerParams: The Min-Max parameters fit on the training split.
    """
    table = read_raw_table(dataset)
    check_schema(table, str(dataset))
    logger.info(f"Preprocessing {len(table)} records from {dataset}")
    train, val, test, scaler = preprocess_table(table, spec)
    write_splits(output, train, val, test, scaler)
    logger.info(f"Split sizes: train {len(train)}, val {len(val)}, test {len(test)}")
    for name, part in (("train", train), ("val", val), ("test", test)):
        logger.info(f"{name} class counts: {part.class_counts()}")
    return scaler
