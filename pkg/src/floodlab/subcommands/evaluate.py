#!/usr/bin/env python3

import json
from pathlib import Path
from typing import Sequence

import click
from loguru import logger

from floodlab.evaluation.metrics import Report, confusion, report
from floodlab.models.architectures import ArchName
from floodlab.nn.model import Model, classify
from floodlab.preprocess.pipeline import read_split
from floodlab.subcommands.train import model_path
from floodlab.utils.constants import METRICS_JSON, METRICS_TSV, TEST_CSV
from floodlab.utils.exceptions import FloodlabError


def subcommand_eval(
    splits: Path,
    model_dir: Path,
    output: Path,
    models: Sequence[ArchName],
    threshold: float = 0.5,
) -> Report:
    """
    Wrapper command for floodlab eval. Scores trained models on test.csv.

    Args:
        splits (Path): Directory holding test.csv.
        model_dir (Path): Directory holding <model>_model.json files.
        output (Path): Output directory path.
        models (Sequence[ArchName]): Architectures to evaluate, in report order.
        threshold (float): Classification threshold on the predicted probability.

    Returns:
        Report: One row per model.
    """
    test = read_split(Path(splits) / TEST_CSV)
    logger.info(f"Evaluating on {len(test)} test rows, class counts {test.class_counts()}")
    rows = []
    for arch in models:
        model = Model.load(model_path(model_dir, arch))
        preds = classify(model.predict(test.features), threshold)
        cm = confusion(test.labels, preds)
        logger.info(f"{model.name}: TP {cm.tp}, TN {cm.tn}, FP {cm.fp}, FN {cm.fn}")
        rows.append((model.name, cm))
    result = report(rows)
    for model_report in result.models:
        if model_report.scores.undefined:
            logger.warning(
                f"{model_report.model}: zero denominator for {', '.join(model_report.scores.undefined)}, reported as 0"
            )

    try:
        with open(Path(output) / METRICS_JSON, "w") as f:
            json.dump(result.to_dict(), f, indent=2)
        with open(Path(output) / METRICS_TSV, "w") as f:
            f.write(result.tsv())
    except OSError as e:
        raise FloodlabError(f"could not write metrics to {output}: {e}") from e

    click.echo(result.table())
    for line in result.table().splitlines():
        logger.info(line)
    return result
