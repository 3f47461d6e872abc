#!/usr/bin/env python3

from pathlib import Path

from loguru import logger

from floodlab.evaluation.metrics import Report
from floodlab.subcommands.dataset import subcommand_dataset
from floodlab.subcommands.evaluate import subcommand_eval
from floodlab.subcommands.preprocess import subcommand_preprocess
from floodlab.subcommands.simulate import subcommand_simulate
from floodlab.subcommands.train import subcommand_train
from floodlab.utils.config import PipelineConfig, stage_seed
from floodlab.utils.constants import DATASET_CSV
from floodlab.utils.util import stage


def subcommand_pipeline(
    config: PipelineConfig,
    output: Path,
    threads: int,
    trace: bool = False,
    progress: bool = True,
) -> Report:
    """
    Wrapper command for floodlab pipeline: simulate, dataset, preprocess, train and eval.

    Every artifact is written to output. A failing stage raises StageError naming it.

    Args:
        config (PipelineConfig): Scenario, split, training and model settings plus the master seed.
        output (Path): Output directory path.
        threads (int): Worker processes for the simulations.
        trace (bool): Write per-packet traces.
        progress (bool): Show training progress bars.

    Returns:
        Report: Test metrics of every selected model.
    """
    output = Path(output)
    train_cfg = config.train_config()

    with stage("simulate"):
        summaries = subcommand_simulate(config.simulation_runs(), output, threads, trace, dump_network=False)

    with stage("dataset"):
        inputs = [Path(s["csv"]) for s in summaries]
        subcommand_dataset(inputs, output, stage_seed(config.seed, "dataset"))

    with stage("preprocess"):
        subcommand_preprocess(output / DATASET_CSV, output, config.split_spec())

    with stage("train"):
        subcommand_train(output, output, config.models, train_cfg, progress=progress)

    with stage("eval"):
        result = subcommand_eval(output, output, output, config.models, train_cfg.classification_threshold)

    logger.info(f"Pipeline finished with master seed {config.seed}")
    return result
