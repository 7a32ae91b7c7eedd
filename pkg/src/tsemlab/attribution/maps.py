"""Explanation-map container, normalization and alignment onto the input grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autograd import linear_interp_matrix
from ..errors import ConfigError, DimensionError

NORMALIZATIONS = ("raw", "minmax", "sum1")


@dataclass(frozen=True)
class ExplanationMap:
    """Non-negative ``(D, T)`` saliency for one instance and target class."""

    values: np.ndarray
    method: str
    target_class: int
    normalization: str = "raw"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DimensionError(f"explanation maps are (D, T); got shape {values.shape}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("explanation map values must be finite and non-negative")
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def normalized(self, mode: str) -> "ExplanationMap":
        return normalize_map(self, mode)


def normalize_values(values, mode: str) -> np.ndarray:
    """Normalize an array of maps over its last two axes.

    ``minmax`` maps each map into [0, 1] (a flat map becomes all zeros);
    ``sum1`` divides by the map total (an all-zero map becomes uniform, the
    only distribution that carries no preference).
    """
    values = np.asarray(values, dtype=np.float64)
    if mode == "raw":
        return values.copy()
    if mode == "minmax":
        lo = values.min(axis=(-2, -1), keepdims=True)
        span = values.max(axis=(-2, -1), keepdims=True) - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (values - lo) / safe, 0.0)
    if mode == "sum1":
        total = values.sum(axis=(-2, -1), keepdims=True)
        cells = values.shape[-2] * values.shape[-1]
        safe = np.where(total > 0, total, 1.0)
        return np.where(total > 0, values / safe, 1.0 / cells)
    raise ConfigError(f"unknown normalization {mode!r}; choose from {', '.join(NORMALIZATIONS)}")


def normalize_map(emap: ExplanationMap | np.ndarray, mode: str):
    if isinstance(emap, ExplanationMap):
        return ExplanationMap(normalize_values(emap.values, mode), emap.method, emap.target_class, mode)
    return normalize_values(emap, mode)


def resample_time(maps: np.ndarray, seq_length: int) -> np.ndarray:
    """Linearly resample the last axis to ``seq_length`` with end points aligned."""
    maps = np.asarray(maps, dtype=np.float64)
    t_in = maps.shape[-1]
    if t_in != seq_length:
        maps = maps @ linear_interp_matrix(t_in, seq_length).T
    return maps


def align_channel_maps(A: np.ndarray, n_features: int, seq_length: int) -> np.ndarray:
    """``(B, C, *S)`` activations to ``(B, C, D, T)``.

    ``S`` is ``(T',)`` for maps with one value per time step, which are
    replicated over the features, or ``(D, T')``. Strided time axes are
    resampled linearly.
    """
    if A.ndim == 3:
        out = resample_time(A, seq_length)
        return np.broadcast_to(out[:, :, None, :], out.shape[:2] + (n_features, seq_length)).copy()
    if A.ndim == 4:
        if A.shape[2] not in (1, n_features):
            raise DimensionError(
                f"activation maps have {A.shape[2]} rows; cannot align them to {n_features} input features"
            )
        out = resample_time(A, seq_length)
        if out.shape[2] == 1:
            out = np.repeat(out, n_features, axis=2)
        return out
    raise DimensionError(f"cannot align activations of shape {A.shape} to a (D, T) grid")
