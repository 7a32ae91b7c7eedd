"""Average ranks, wins/ties and the Bonferroni-Dunn critical difference."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from ..errors import ConfigError


@dataclass(frozen=True)
class RankTable:
    models: tuple[str, ...]
    average_ranks: np.ndarray
    wins_ties: np.ndarray
    ranks: np.ndarray  # (datasets, models)

    def as_dict(self) -> dict:
        return {
            m: {"average_rank": float(r), "wins_ties": int(w)}
            for m, r, w in zip(self.models, self.average_ranks, self.wins_ties)
        }


def rank_table(accuracies, models=None) -> RankTable:
    """Rank models per dataset (1 = best, ties share the mean rank) and average.

    ``accuracies`` is ``(datasets, models)``; missing entries (NaN) rank below
    every reported accuracy. Wins/ties count the datasets on which a model
    attains the best accuracy.
    """
    acc = np.asarray(accuracies, dtype=np.float64)
    if acc.ndim != 2 or acc.shape[1] < 2:
        raise ConfigError("rank_table needs a (datasets, models) matrix with at least two models")
    models = tuple(models) if models is not None else tuple(f"model_{j}" for j in range(acc.shape[1]))
    if len(models) != acc.shape[1]:
        raise ConfigError(f"{len(models)} model names for {acc.shape[1]} columns")
    filled = np.where(np.isnan(acc), -np.inf, acc)
    ranks = np.vstack([rankdata(-row, method="average") for row in filled])
    best = filled.max(axis=1, keepdims=True)
    wins = np.sum(filled == best, axis=0)
    return RankTable(models, ranks.mean(axis=0), wins, ranks)


def bonferroni_dunn_q(k: int, alpha: float = 0.05) -> float:
    """Two-tailed normal quantile with the Bonferroni correction over ``k - 1`` comparisons."""
    if k < 2:
        raise ConfigError("critical difference needs at least two methods")
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1)")
    return float(norm.ppf(1.0 - alpha / (2.0 * (k - 1))))


@dataclass(frozen=True)
class CriticalDifference:
    cd: float
    q: float
    groups: tuple[tuple[str, ...], ...]


def critical_difference(avg_ranks, k: int | None = None, n_datasets: int = 1, alpha: float = 0.05, names=None) -> CriticalDifference:
    """``CD = q * sqrt(k (k + 1) / (6 N))`` and the maximal groups whose rank spread is below CD."""
    ranks = np.asarray(avg_ranks, dtype=np.float64)
    k = len(ranks) if k is None else int(k)
    if n_datasets < 1:
        raise ConfigError("n_datasets must be positive")
    q = bonferroni_dunn_q(k, alpha)
    cd = q * math.sqrt(k * (k + 1) / (6.0 * n_datasets))
    names = tuple(names) if names is not None else tuple(str(i) for i in range(len(ranks)))
    order = np.argsort(ranks, kind="stable")
    spans = []
    for i in range(len(order)):
        j = i
        while j + 1 < len(order) and ranks[order[j + 1]] - ranks[order[i]] < cd:
            j += 1
        if j > i and not any(a <= i and j <= b for a, b in spans):
            spans.append((i, j))
    groups = tuple(tuple(names[order[t]] for t in range(a, b + 1)) for a, b in spans)
    return CriticalDifference(cd, q, groups)
