"""Adam with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .tensor import Tensor


@dataclass
class AdamState:
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> list[np.ndarray]:
    """Return updated copies of ``params``; ``state`` is advanced in place."""
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    state.step += 1
    c1 = 1.0 - beta1**state.step
    c2 = 1.0 - beta2**state.step
    updated = []
    for idx, (p, g) in enumerate(zip(params, grads)):
        state.m[idx] = beta1 * state.m[idx] + (1.0 - beta1) * g
        state.v[idx] = beta2 * state.v[idx] + (1.0 - beta2) * g * g
        m_hat = state.m[idx] / c1
        v_hat = state.v[idx] / c2
        updated.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
    return updated


class Adam:
    """Applies :func:`adam_step` to a list of leaf tensors using their ``.grad``."""

    def __init__(self, params: Sequence[Tensor], lr=1e-3, betas=(0.9, 0.999), eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.state = AdamState()

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in self.params]
        new = adam_step(
            [p.data for p in self.params], grads, self.state, self.lr, self.betas[0], self.betas[1], self.eps
        )
        for p, value in zip(self.params, new):
            p.data = value
