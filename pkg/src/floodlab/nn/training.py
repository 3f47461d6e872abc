"""
Minibatch training loop.
"""

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
import pandas as pd
from alive_progress import alive_bar
from loguru import logger

from floodlab.nn.losses import bce_loss
from floodlab.nn.model import Model, classify
from floodlab.nn.optim import AdamState, adam_step
from floodlab.utils.exceptions import ConfigError, FloodlabError, TrainingError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    learning_rate: float = 0.001
    batch_size: int = 64
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    classification_threshold: float = 0.5

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be at least 1, got {self.batch_size}")
        if not 0.0 < self.classification_threshold < 1.0:
            raise ConfigError(
                f"classification_threshold must be in (0, 1), got {self.classification_threshold}"
            )
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0 and self.eps > 0):
            raise ConfigError("adam needs 0 <= beta1, beta2 < 1 and eps > 0")

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "TrainConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown train keys: {sorted(unknown)}")
        return cls(**values)


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float


@dataclass
class History:
    epochs: List[EpochStats] = field(default_factory=list)

    @property
    def train_loss(self) -> List[float]:
        return [e.train_loss for e in self.epochs]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [asdict(e) for e in self.epochs],
            columns=["epoch", "train_loss", "val_loss", "val_accuracy"],
        )

    def to_csv(self, path: Union[str, Path]) -> None:
        try:
            self.to_frame().to_csv(path, index=False)
        except OSError as e:
            raise FloodlabError(f"could not write history {path}: {e}") from e

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "History":
        frame = pd.read_csv(path)
        return cls([EpochStats(int(r.epoch), r.train_loss, r.val_loss, r.val_accuracy) for r in frame.itertuples()])


def evaluate_loss(model: Model, x: np.ndarray, y: np.ndarray, threshold: float) -> Dict[str, float]:
    """Loss and accuracy with dropout off."""
    if len(y) == 0:
        return {"loss": math.nan, "accuracy": math.nan}
    p = model.predict(x)
    loss, _ = bce_loss(p, y)
    accuracy = float(np.mean(classify(p, threshold) == y))
    return {"loss": loss, "accuracy": accuracy}


def train(model: Model, train, val, cfg: TrainConfig, progress: bool = False) -> History:
    """
    Run cfg.epochs passes of shuffled minibatch ADAM over train.

    Args:
        model (Model): Model to fit; its parameters are updated in place.
        train (DatasetMatrix): Training rows (features and labels).
        val (Optional[DatasetMatrix]): Validation rows, evaluated after every epoch.
        cfg (TrainConfig): Hyperparameters and seed.
        progress (bool): Show an alive_progress bar per epoch.

    Returns:
        History: Per-epoch train loss, val loss and val accuracy. The model
        keeps its last-epoch parameters.

    Raises:
        TrainingError: Empty training set or a non-finite loss.
    """
    x = np.asarray(train.features, dtype=np.float64)
    y = np.asarray(train.labels, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise TrainingError("training set is empty")
    rng = np.random.default_rng(cfg.seed)
    params = model.parameters()
    state = AdamState()
    step = 0
    history = History()
    n_batches = math.ceil(n / cfg.batch_size)
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        with alive_bar(n_batches, title=f"{model.name} epoch {epoch}", disable=not progress) as bar:
            for start in range(0, n, cfg.batch_size):
                rows = order[start : start + cfg.batch_size]
                loss, grads = model.loss_and_gradients(x[rows], y[rows], rng)
                if not math.isfinite(loss):
                    raise TrainingError(
                        f"non-finite loss {loss} at epoch {epoch}, step {step + 1} ({model.name})"
                    )
                step += 1
                adam_step(params, grads, state, step, cfg)
                total += loss * len(rows)
                bar()
        val_stats = (
            evaluate_loss(model, val.features, val.labels, cfg.classification_threshold)
            if val is not None
            else {"loss": math.nan, "accuracy": math.nan}
        )
        stats = EpochStats(epoch, total / n, val_stats["loss"], val_stats["accuracy"])
        history.epochs.append(stats)
        logger.info(
            f"{model.name} epoch {epoch}/{cfg.epochs}: train_loss {stats.train_loss:.6f} "
            f"val_loss {stats.val_loss:.6f} val_accuracy {stats.val_accuracy:.4f}"
        )
    return history
