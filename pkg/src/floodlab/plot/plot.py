from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from loguru import logger

from floodlab.evaluation.metrics import Report
from floodlab.nn.training import History

METRIC_LABELS = (
    ("accuracy", "Accuracy"),
    ("precision", "Precision"),
    ("recall", "Recall"),
    ("f1", "F1 Score"),
    ("false_alarm_rate", "False alarm"),
)


def _save(fig, output: Path, stem: str, dpi: int) -> List[Path]:
    png_plot_file: Path = Path(output) / f"{stem}.png"
    svg_plot_file: Path = Path(output) / f"{stem}.svg"

    # save as png
    fig.savefig(png_plot_file, dpi=dpi)

    # Save the image as an SVG
    fig.savefig(svg_plot_file, format="svg", dpi=dpi)
    plt.close(fig)
    logger.info(f"Saved {png_plot_file} and {svg_plot_file}")
    return [png_plot_file, svg_plot_file]


def plot_history(history: History, model_name: str, output: Path, dpi: int = 300) -> List[Path]:
    """
    Training curves of one model: train and val loss, and val accuracy on a second axis.

    Args:
        history (History): Per-epoch statistics.
        model_name (str): Used in the title and the file names.
        output (Path): Output directory path.
        dpi (int): Dots per inch for the png.

    Returns:
        List[Path]: The png and svg files.
    """
    frame = history.to_frame()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(frame["epoch"], frame["train_loss"], marker="o", label="train loss")
    ax.plot(frame["epoch"], frame["val_loss"], marker="s", label="val loss")
    ax.set_xlabel("Epoch")
    ax.set_ylabel("Binary cross-entropy")
    ax.set_title(f"{model_name} training")
    acc_ax = ax.twinx()
    acc_ax.plot(frame["epoch"], frame["val_accuracy"], color="tab:green", linestyle="--", label="val accuracy")
    acc_ax.set_ylabel("Validation accuracy")
    acc_ax.set_ylim(0, 1.05)
    handles, labels = ax.get_legend_handles_labels()
    acc_handles, acc_labels = acc_ax.get_legend_handles_labels()
    ax.legend(handles + acc_handles, labels + acc_labels, loc="center right", fontsize=8)
    fig.tight_layout()
    return _save(fig, output, f"{model_name.lower()}_history", dpi)


def plot_metrics(result: Report, output: Path, dpi: int = 300) -> List[Path]:
    """Grouped bars of every metric, one group per metric and one bar per model."""
    fig, ax = plt.subplots(figsize=(7, 4))
    n_models = len(result.models)
    width = 0.8 / max(n_models, 1)
    positions = np.arange(len(METRIC_LABELS))
    for i, model_report in enumerate(result.models):
        values = [100 * getattr(model_report.scores, key) for key, _ in METRIC_LABELS]
        ax.bar(positions + (i - (n_models - 1) / 2) * width, values, width, label=model_report.model)
    ax.set_xticks(positions)
    ax.set_xticklabels([label for _, label in METRIC_LABELS])
    ax.set_ylabel("%")
    ax.set_ylim(0, 105)
    ax.legend(fontsize=8)
    ax.set_title("Test set metrics")
    fig.tight_layout()
    return _save(fig, output, "metrics", dpi)
