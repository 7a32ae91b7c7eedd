"""Average Drop / Average Increase and Deletion / Insertion curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..attribution.maps import normalize_values
from ..errors import ConfigError, DimensionError, NumericError
from ..models.graph import ModelGraph
from ..models.training import predict_proba


@dataclass(frozen=True)
class FaithfulnessSample:
    """Class probability on the original (``y``) and masked (``o``) instance."""

    y: float
    o: float

    def __post_init__(self):
        for v in (self.y, self.o):
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"faithfulness probabilities must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    prob: float


def _pairs(samples) -> tuple[np.ndarray, np.ndarray]:
    samples = list(samples)
    y = np.array([s.y for s in samples], dtype=np.float64)
    o = np.array([s.o for s in samples], dtype=np.float64)
    return y, o


def average_drop(samples) -> float:
    """Mean relative confidence drop in percent; samples with ``y == 0`` are skipped."""
    y, o = _pairs(samples)
    keep = y > 0
    if not keep.any():
        return 0.0
    return float(np.mean(np.maximum(0.0, y[keep] - o[keep]) / y[keep]) * 100.0)


def average_increase(samples) -> float:
    """Percentage of samples whose masked probability strictly exceeds the original."""
    y, o = _pairs(samples)
    if y.size == 0:
        return 0.0
    return float(np.mean(y < o) * 100.0)


def mask_by_explanation(instance, emap) -> np.ndarray:
    """Elementwise product of the instance with its min-max normalized map."""
    x = np.asarray(instance, dtype=np.float64)
    m = np.asarray(getattr(emap, "values", emap), dtype=np.float64)
    if m.shape != x.shape[-2:]:
        raise DimensionError(f"map shape {m.shape} does not match instance {x.shape[-2:]}")
    return x * normalize_values(m, "minmax")


def faithfulness_samples(model: ModelGraph, instances, classes, maps) -> list[FaithfulnessSample]:
    X = np.asarray(instances, dtype=np.float64)
    maps = np.asarray(maps, dtype=np.float64)
    classes = np.asarray(classes, dtype=int)
    idx = np.arange(len(X))
    y = predict_proba(model, X)[idx, classes]
    o = predict_proba(model, X * normalize_values(maps, "minmax"))[idx, classes]
    return [FaithfulnessSample(float(a), float(b)) for a, b in zip(y, o)]


def saliency_order(maps: np.ndarray) -> np.ndarray:
    """Flat cell indices by decreasing saliency; ties keep row-major order."""
    flat = np.asarray(maps, dtype=np.float64).reshape(len(maps), -1)
    return np.argsort(-flat, axis=1, kind="stable")


def _schedule(cells: int, step_fraction: float) -> np.ndarray:
    if not 0.0 < step_fraction <= 0.5:
        raise ConfigError(f"step_fraction must lie in (0, 0.5], got {step_fraction}")
    batch = math.ceil(step_fraction * cells)
    return np.unique(np.append(np.arange(0, cells, batch), cells))


def _curves(model, X, classes, maps, step_fraction, insert: bool):
    X = np.asarray(X, dtype=np.float64)
    maps = np.asarray(maps, dtype=np.float64)
    classes = np.asarray(classes, dtype=int)
    if maps.shape != X.shape:
        raise DimensionError(f"maps {maps.shape} do not match instances {X.shape}")
    B, D, T = X.shape
    counts = _schedule(D * T, step_fraction)
    order = saliency_order(maps)
    # rank[b, cell] = position of the cell in the removal order
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(D * T)[None].repeat(B, axis=0), axis=1)
    touched = rank[:, None, :] < counts[None, :, None]  # (B, S, cells)
    flat = X.reshape(B, 1, D * T)
    stacked = np.where(touched, flat, 0.0) if insert else np.where(touched, 0.0, flat)
    probs = predict_proba(model, stacked.reshape(-1, D, T)).reshape(B, len(counts), -1)
    probs = probs[np.arange(B), :, classes]
    bad = ~np.isfinite(probs)
    if bad.any():
        step = int(np.argwhere(bad)[0][1])
        raise NumericError(f"{'insertion' if insert else 'deletion'} curve: non-finite probability at step {step}")
    fractions = counts / (D * T)
    return fractions, probs, np.trapezoid(probs, fractions, axis=1)


def deletion_curves(model, instances, classes, maps, step_fraction: float = 0.05):
    """Batched deletion: zero the most salient cells first.

    Returns ``(fractions (S,), probs (B, S), auc (B,))``; all steps of all
    instances go through the model in one batched pass.
    """
    return _curves(model, instances, classes, maps, step_fraction, insert=False)


def insertion_curves(model, instances, classes, maps, step_fraction: float = 0.05):
    """Batched insertion into an all-zero instance, most salient cells first."""
    return _curves(model, instances, classes, maps, step_fraction, insert=True)


def _single(fn, model, instance, c, emap, step_fraction):
    values = np.asarray(getattr(emap, "values", emap), dtype=np.float64)
    fr, probs, auc = fn(model, np.asarray(instance)[None], [c], values[None], step_fraction)
    return [CurvePoint(float(f), float(p)) for f, p in zip(fr, probs[0])], float(auc[0])


def deletion_curve(model, instance, c, emap, step_fraction: float = 0.05):
    return _single(deletion_curves, model, instance, c, emap, step_fraction)


def insertion_curve(model, instance, c, emap, step_fraction: float = 0.05):
    return _single(insertion_curves, model, instance, c, emap, step_fraction)


def curve_auc(fractions, probs) -> float:
    return float(np.trapezoid(np.asarray(probs, dtype=np.float64), np.asarray(fractions, dtype=np.float64)))


def delete_top_fraction(instances, maps, fraction: float) -> np.ndarray:
    """Zero the ``ceil(fraction * D * T)`` most salient cells of each instance."""
    X = np.asarray(instances, dtype=np.float64)
    B, D, T = X.shape
    n = math.ceil(fraction * D * T)
    order = saliency_order(maps)[:, :n]
    out = X.reshape(B, -1).copy()
    np.put_along_axis(out, order, 0.0, axis=1)
    return out.reshape(X.shape)


def delete_random_fraction(instances, fraction: float, rng: np.random.Generator) -> np.ndarray:
    X = np.asarray(instances, dtype=np.float64)
    return delete_top_fraction(X, rng.random(X.shape), fraction)
