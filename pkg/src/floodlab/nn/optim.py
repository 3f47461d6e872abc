"""
ADAM with bias correction over a dict of named parameters.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from floodlab.utils.exceptions import ConfigError

Params = Dict[str, np.ndarray]


@dataclass
class AdamState:
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)
    t: int = 0


def adam_step(
    params: Params, grads: Params, state: AdamState, t: int, cfg
) -> Tuple[Params, AdamState]:
    """
    One ADAM update, in place.

    Args:
        params (Params): Parameters keyed by name, updated in place.
        grads (Params): Gradients with the same keys.
        state (AdamState): First and second moments; created lazily per key.
        t (int): Step number, starting at 1.
        cfg (TrainConfig): learning_rate, beta1, beta2 and eps.

    Returns:
        Tuple[Params, AdamState]: The same params and state objects.

    Raises:
        ConfigError: t is below 1.
    """
    if t < 1:
        raise ConfigError(f"adam step number must be at least 1, got {t}")
    beta1, beta2 = cfg.beta1, cfg.beta2
    bc1 = 1.0 - beta1**t
    bc2 = 1.0 - beta2**t
    for key, g in grads.items():
        if key not in state.m:
            state.m[key] = np.zeros_like(params[key])
            state.v[key] = np.zeros_like(params[key])
        m = state.m[key]
        v = state.v[key]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        params[key] -= cfg.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
    state.t = t
    return params, state
