"""Row-sum and column-sum uniformity checks on sum-normalized maps."""

from __future__ import annotations

import numpy as np

TOLERANCE = 1e-9


def _as_map(values) -> np.ndarray:
    values = np.asarray(getattr(values, "values", values), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a (D, T) map, got shape {values.shape}")
    total = values.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"map must be sum1-normalized (total {total:.6g})")
    return values


def spatiality_check(emap, tol: float = TOLERANCE) -> bool:
    """Pass iff no feature row carries exactly its uniform share ``1/D``."""
    m = _as_map(emap)
    return bool(np.all(np.abs(m.sum(axis=1) - 1.0 / m.shape[0]) > tol))


def temporality_check(emap, tol: float = TOLERANCE) -> bool:
    """Pass iff no time column carries exactly its uniform share ``1/T``."""
    m = _as_map(emap)
    return bool(np.all(np.abs(m.sum(axis=0) - 1.0 / m.shape[1]) > tol))


def spatiotemporality_check(emap, tol: float = TOLERANCE) -> bool:
    return spatiality_check(emap, tol) and temporality_check(emap, tol)
