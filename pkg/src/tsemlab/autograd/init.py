"""Parameter initializers (fan-in scaled uniform)."""

from __future__ import annotations

import numpy as np


def fan_in_uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    limit = np.sqrt(1.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


def lstm_weights(rng: np.random.Generator, n_inputs: int, hidden: int, forget_bias: float = 1.0):
    """Uniform(+-1/sqrt(H)) weights; forget-gate bias block set to ``forget_bias``."""
    limit = np.sqrt(1.0 / hidden)
    w_ih = rng.uniform(-limit, limit, size=(4 * hidden, n_inputs))
    w_hh = rng.uniform(-limit, limit, size=(4 * hidden, hidden))
    bias = rng.uniform(-limit, limit, size=4 * hidden)
    bias[hidden : 2 * hidden] = forget_bias
    return w_ih, w_hh, bias
