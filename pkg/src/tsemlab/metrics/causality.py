"""Cascading-randomization sanity check for explanation methods."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..data import MTSDataset
from ..errors import ConfigError, ModelNotTrainedError
from ..models.graph import ModelGraph
from ..models.training import predict
from .classification import chance_threshold
from .stats import ChiSquareTest, chi_square, pearson_rows

AXES = ("feature", "time")
NON_CAUSAL_R = 0.95
PASS_PROPORTION = 0.10

# explain(instances (B, D, T), classes (B,), seeds (B,)) -> maps (B, D, T)
Explainer = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def cascade_permutations(shape: tuple[int, int], axis: str, rng: np.random.Generator) -> list[np.ndarray]:
    """One permutation per slice along ``axis``, drawn in slice order."""
    D, T = shape
    if axis == "feature":
        return [rng.permutation(T) for _ in range(D)]
    if axis == "time":
        return [rng.permutation(D) for _ in range(T)]
    raise ConfigError(f"unknown cascade axis {axis!r}; choose from {', '.join(AXES)}")


def cascade_randomize(instance, axis: str, step: int, rng=None, permutations=None) -> np.ndarray:
    """Permute the values within each slice ``0..step`` (inclusive) along ``axis``.

    Feature slices are rows, time slices are columns. Slices after ``step``
    are left bit-identical. Passing the same ``permutations`` for successive
    steps gives a true cascade (step ``s`` extends step ``s - 1``).
    """
    x = np.array(instance, dtype=np.float64)
    D, T = x.shape
    n_slices = D if axis == "feature" else T
    if axis not in AXES:
        raise ConfigError(f"unknown cascade axis {axis!r}")
    if not 0 <= step < n_slices:
        raise ConfigError(f"cascade step {step} outside [0, {n_slices})")
    if permutations is None:
        if rng is None:
            raise ConfigError("cascade_randomize needs an rng or precomputed permutations")
        permutations = cascade_permutations((D, T), axis, rng)
    for s in range(step + 1):
        if axis == "feature":
            x[s] = x[s, permutations[s]]
        else:
            x[:, s] = x[permutations[s], s]
    return x


def cascade_stack(instance, axis: str, rng: np.random.Generator) -> np.ndarray:
    """All cascade steps of one instance: ``(n_slices, D, T)``."""
    x = np.asarray(instance, dtype=np.float64)
    perms = cascade_permutations(x.shape, axis, rng)
    out = np.empty((len(perms),) + x.shape)
    current = x.copy()
    for s, p in enumerate(perms):
        if axis == "feature":
            current[s] = current[s, p]
        else:
            current[:, s] = current[p, s]
        out[s] = current
    return out


@dataclass(frozen=True)
class CausalityRecord:
    instance: int
    axis: str
    step: int
    r: float
    non_causal: bool
    degenerate: bool = False


@dataclass
class CausalityReport:
    feature_proportion: float
    time_proportion: float
    passed: bool
    records: list[CausalityRecord] = field(default_factory=list)
    chi_square: dict[str, ChiSquareTest] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "feature_proportion": self.feature_proportion,
            "time_proportion": self.time_proportion,
            "pass": self.passed,
            "n_records": len(self.records),
            "chi_square": {
                axis: {"statistic": t.statistic, "dof": t.dof, "p_value": t.p_value} for axis, t in self.chi_square.items()
            },
        }


def ensure_trained(model: ModelGraph, dataset: MTSDataset) -> float:
    """Refuse models whose accuracy is indistinguishable from guessing."""
    acc = float(np.mean(predict(model, dataset.X) == dataset.y))
    limit = chance_threshold(model.config.n_classes, len(dataset))
    if acc <= limit:
        raise ModelNotTrainedError(
            f"model accuracy {acc:.3f} does not exceed chance level ({limit:.3f} for "
            f"K={model.config.n_classes}, N={len(dataset)}); train it before checking causality"
        )
    return acc


def causality_report(
    model: ModelGraph,
    explainer: Explainer,
    dataset: MTSDataset,
    rng: np.random.Generator | int = 0,
    classes=None,
    threshold: float = NON_CAUSAL_R,
    check_trained: bool = True,
) -> CausalityReport:
    """Correlate each instance's explanation with explanations of its cascades.

    Every (instance, axis, step) yields one record; it is non-causal when the
    correlation stays at or above ``threshold``. The method passes when fewer
    than 10% of the records on each axis are non-causal. Explanations target
    ``classes`` (default: the model's predictions on the clean instances).
    """
    if check_trained:
        ensure_trained(model, dataset)
    seed_seq = np.random.SeedSequence(rng if isinstance(rng, (int, np.integer)) else rng.integers(2**32))
    X = dataset.X
    N = len(X)
    cls = predict(model, X) if classes is None else np.asarray(classes, dtype=int)
    base = explainer(X, cls, np.arange(N))
    children = seed_seq.spawn(N)

    records: list[CausalityRecord] = []
    proportions, tests = {}, {}
    for axis_id, axis in enumerate(AXES):
        stacks = [cascade_stack(X[i], axis, np.random.default_rng(children[i].spawn(2)[axis_id])) for i in range(N)]
        steps = stacks[0].shape[0]
        flat = np.concatenate(stacks)
        owner = np.repeat(np.arange(N), steps)
        maps = explainer(flat, cls[owner], owner)
        r, degenerate = pearson_rows(maps, base[owner])
        flags = r >= threshold
        for j in range(len(flat)):
            records.append(
                CausalityRecord(int(owner[j]), axis, int(j % steps), float(r[j]), bool(flags[j]), bool(degenerate[j]))
            )
        proportions[axis] = float(flags.mean())
        tests[axis] = chi_square(r, 1.0)
    passed = proportions["feature"] < PASS_PROPORTION and proportions["time"] < PASS_PROPORTION
    return CausalityReport(proportions["feature"], proportions["time"], passed, records, tests)
