"""Central finite-difference gradient checking."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor, backward, mul, sum_


def numeric_gradient(fn: Callable[[], float], array: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """d fn / d array by central differences, perturbing ``array`` in place."""
    out = np.zeros_like(array)
    flat = array.reshape(-1)
    grad_flat = out.reshape(-1)
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + h
        plus = fn()
        flat[idx] = orig - h
        minus = fn()
        flat[idx] = orig
        grad_flat[idx] = (plus - minus) / (2 * h)
    return out


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    denom = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / denom)


def gradcheck(
    fn: Callable[..., Tensor],
    inputs: Sequence[np.ndarray],
    h: float = 1e-5,
    seed: int = 0,
) -> float:
    """Worst relative error between analytic and numeric gradients over ``inputs``.

    ``fn`` maps tensors to a tensor of any shape; it is contracted with a fixed
    random projection so every output element contributes.
    """
    arrays = [np.array(a, dtype=np.float64) for a in inputs]
    probe = fn(*[Tensor(a) for a in arrays])
    weights = np.random.default_rng([seed, 7919]).standard_normal(probe.shape)

    def scalar() -> float:
        return float((fn(*[Tensor(a) for a in arrays]).data * weights).sum())

    leaves = [Tensor(a, requires_grad=True) for a in arrays]
    backward(sum_(mul(fn(*leaves), Tensor(weights))))
    worst = 0.0
    for leaf, arr in zip(leaves, arrays):
        analytic = leaf.grad if leaf.grad is not None else np.zeros_like(arr)
        numeric = numeric_gradient(scalar, arr, h)
        worst = max(worst, relative_error(analytic, numeric))
    return worst
