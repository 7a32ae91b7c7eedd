"""Correlation and goodness-of-fit statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from ..errors import DimensionError


@dataclass(frozen=True)
class Correlation:
    r: float
    degenerate: bool = False


def pearson(a, b) -> Correlation:
    """Pearson correlation of two flattened maps.

    If either map has zero variance the coefficient is undefined; it is
    reported as 0 with ``degenerate`` set.
    """
    a = np.ravel(np.asarray(a, dtype=np.float64))
    b = np.ravel(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionError(f"cannot correlate maps of {a.size} and {b.size} cells")
    da, db = a - a.mean(), b - b.mean()
    va, vb = float(da @ da), float(db @ db)
    if va == 0.0 or vb == 0.0:
        return Correlation(0.0, True)
    r = float(da @ db) / (np.sqrt(va) * np.sqrt(vb))
    return Correlation(float(np.clip(r, -1.0, 1.0)))


def pearson_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise :func:`pearson` over ``(n, ...)`` stacks; returns (r, degenerate)."""
    a = np.asarray(a, dtype=np.float64).reshape(len(a), -1)
    b = np.asarray(b, dtype=np.float64).reshape(len(b), -1)
    da = a - a.mean(axis=1, keepdims=True)
    db = b - b.mean(axis=1, keepdims=True)
    va, vb = (da * da).sum(axis=1), (db * db).sum(axis=1)
    degenerate = (va == 0) | (vb == 0)
    denom = np.sqrt(np.where(degenerate, 1.0, va)) * np.sqrt(np.where(degenerate, 1.0, vb))
    r = np.where(degenerate, 0.0, (da * db).sum(axis=1) / denom)
    return np.clip(r, -1.0, 1.0), degenerate


@dataclass(frozen=True)
class ChiSquareTest:
    observed: tuple[float, ...]
    expected: float
    statistic: float
    dof: int
    p_value: float

    def significant(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def chi_square(observed, expected: float = 1.0) -> ChiSquareTest:
    """Pearson goodness-of-fit of ``observed`` against a constant expectation."""
    obs = np.asarray(observed, dtype=np.float64).ravel()
    if obs.size < 2:
        raise ValueError("chi-square needs at least two observations (dof >= 1)")
    if expected <= 0:
        raise ValueError("expected value must be positive")
    stat = float(np.sum((obs - expected) ** 2 / expected))
    dof = obs.size - 1
    return ChiSquareTest(tuple(obs.tolist()), float(expected), stat, dof, float(chi2.sf(stat, dof)))
