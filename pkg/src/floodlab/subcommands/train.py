#!/usr/bin/env python3

from pathlib import Path
from typing import Dict, Sequence

from loguru import logger

from floodlab.models.architectures import ArchName, build_model
from floodlab.nn.training import History, TrainConfig, train
from floodlab.preprocess.pipeline import read_split
from floodlab.utils.constants import TRAIN_CSV, VAL_CSV


def model_path(output: Path, arch: ArchName) -> Path:
    return Path(output) / f"{arch.value}_model.json"


def history_path(output: Path, arch: ArchName) -> Path:
    return Path(output) / f"{arch.value}_history.csv"


def subcommand_train(
    splits: Path,
    output: Path,
    models: Sequence[ArchName],
    cfg: TrainConfig,
    progress: bool = True,
) -> Dict[ArchName, History]:
    """
    Wrapper command for floodlab train. Fits each selected architecture on train.csv.

    Args:
        splits (Path): Directory holding train.csv and val.csv.
        output (Path): Output directory path.
        models (Sequence[ArchName]): Architectures to train.
        cfg (TrainConfig): Hyperparameters; cfg.seed seeds initialisation, shuffling and dropout.
        progress (bool): Show progress bars.

    Returns:
        Dict[ArchName, History]: Per-epoch history of every model.
    """
    train_set = read_split(Path(splits) / TRAIN_CSV)
    val_set = read_split(Path(splits) / VAL_CSV)
    logger.info(
        f"Training on {len(train_set)} rows, validating on {len(val_set)} rows, "
        f"{train_set.n_features} features"
    )
    histories = {}
    for arch in models:
        model = build_model(arch, train_set.n_features, seed=cfg.seed)
        logger.info(f"Training {model.name} ({model.parameter_count()} parameters) for {cfg.epochs} epochs")
        history = train(model, train_set, val_set, cfg, progress=progress)
        model.save(model_path(output, arch))
        history.to_csv(history_path(output, arch))
        logger.info(f"Saved {model.name} to {model_path(output, arch)}")
        histories[arch] = history
    return histories
