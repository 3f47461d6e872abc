"""
Central finite-difference gradient checks.
"""

from typing import Callable, Dict, Optional

import numpy as np

from floodlab.nn.layers import Layer


def numerical_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """
    (f(x + eps) - f(x - eps)) / 2 eps for every element of x.

    x is perturbed in place and restored.
    """
    grad = np.zeros_like(x, dtype=np.float64)
    it = np.nditer(x, flags=["multi_index"], op_flags=["readwrite"])
    while not it.finished:
        idx = it.multi_index
        original = x[idx]
        x[idx] = original + eps
        plus = f(x)
        x[idx] = original - eps
        minus = f(x)
        x[idx] = original
        grad[idx] = (plus - minus) / (2 * eps)
        it.iternext()
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a|| + ||n||, 1e-12)."""
    diff = np.linalg.norm(analytic - numeric)
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    return float(diff / max(scale, 1e-12))


def check_layer(
    layer: Layer,
    x: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    training: bool = False,
    eps: float = 1e-6,
) -> Dict[str, float]:
    """
    Compare a layer's backward pass to finite differences.

    The objective is sum(forward(x) * R) for a fixed random R. A dropout
    layer keeps the mask drawn on the first pass.

    Returns:
        Dict[str, float]: Relative error for "x" and for every parameter.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    x = np.array(x, dtype=np.float64)
    out = layer.forward(x, training=training, rng=rng, cache=True)
    weights = rng.standard_normal(out.shape)
    analytic_x = layer.backward(weights)
    analytic = {name: g.copy() for name, g in layer.grads.items()}

    def objective(_):
        return float(np.sum(layer.forward(x, training=training, rng=None) * weights))

    errors = {"x": relative_error(analytic_x, numerical_gradient(objective, x, eps))}
    for name, param in layer.params.items():
        errors[name] = relative_error(analytic[name], numerical_gradient(objective, param, eps))
    return errors
