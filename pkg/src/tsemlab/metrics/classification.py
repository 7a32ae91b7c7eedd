from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)


def accuracy(counts: ConfusionCounts) -> float:
    if counts.total == 0:
        raise ValueError("accuracy of an empty confusion table is undefined")
    return (counts.tp + counts.tn) / counts.total


def confusion_counts(y_true, y_pred, n_classes: int | None = None) -> ConfusionCounts:
    """Accumulate counts so that :func:`accuracy` equals the fraction of correct predictions.

    Two classes use the usual table with class 1 as positive. With more classes
    each instance is tallied once, in the one-vs-rest table of its true class:
    a hit is a true positive and a miss a false negative.
    """
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise DimensionError(f"{y_true.shape[0]} labels but {y_pred.shape[0]} predictions")
    k = n_classes if n_classes is not None else int(max(y_true.max(initial=0), y_pred.max(initial=0))) + 1
    if k <= 2:
        return ConfusionCounts(
            tp=int(np.sum((y_true == 1) & (y_pred == 1))),
            fp=int(np.sum((y_true == 0) & (y_pred == 1))),
            tn=int(np.sum((y_true == 0) & (y_pred == 0))),
            fn=int(np.sum((y_true == 1) & (y_pred == 0))),
        )
    hits = int(np.sum(y_true == y_pred))
    return ConfusionCounts(tp=hits, fn=len(y_true) - hits)


def accuracy_score(y_true, y_pred) -> float:
    return accuracy(confusion_counts(y_true, y_pred))


def chance_threshold(n_classes: int, n_instances: int) -> float:
    """Accuracy a guessing classifier exceeds with roughly 2.5% probability.

    Uniform guessing gives Binomial(N, 1/K) hits; the threshold sits two
    standard deviations above its mean.
    """
    p = 1.0 / n_classes
    return p + 2.0 * np.sqrt(p * (1 - p) / max(n_instances, 1))
