from typing import Tuple

import numpy as np

from floodlab.utils.exceptions import ShapeError

BCE_EPS = 1e-7


def bce_loss(pred: np.ndarray, y: np.ndarray, eps: float = BCE_EPS) -> Tuple[float, np.ndarray]:
    """
    Binary cross-entropy averaged over the batch.

    Predictions are clamped to [eps, 1 - eps] first.

    Args:
        pred (np.ndarray): Probabilities, shape (batch,) or (batch, 1).
        y (np.ndarray): 0/1 targets of the same length.

    Returns:
        Tuple[float, np.ndarray]: The loss and its gradient w.r.t. pred (shaped like pred).
    """
    pred = np.asarray(pred, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if y.size != pred.size:
        raise ShapeError(f"{pred.size} predictions but {y.size} targets")
    y = y.reshape(pred.shape)
    n = pred.shape[0]
    p = np.clip(pred, eps, 1.0 - eps)
    loss = -np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    grad = (-(y / p) + (1.0 - y) / (1.0 - p)) / n
    return float(loss), grad
