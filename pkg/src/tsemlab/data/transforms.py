from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import ConfigError, DimensionError
from .dataset import MTSDataset

STD_FLOOR = 1e-8


def fit_channel_stats(dataset: MTSDataset) -> tuple[np.ndarray, np.ndarray]:
    mean = dataset.X.mean(axis=(0, 2))
    std = dataset.X.std(axis=(0, 2))
    return mean, std


def apply_normalization(dataset: MTSDataset, mean, std) -> MTSDataset:
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(std, dtype=np.float64)
    if mean.shape != (dataset.n_features,) or std.shape != (dataset.n_features,):
        raise DimensionError(f"normalization stats for {mean.shape[0]} channels, dataset has {dataset.n_features}")
    X = (dataset.X - mean[None, :, None]) / np.maximum(std, STD_FLOOR)[None, :, None]
    return replace(dataset, X=X, channel_mean=mean, channel_std=std)


def z_normalize(train: MTSDataset, *others: MTSDataset):
    """Per-channel z-normalization fitted on ``train`` and reapplied to ``others``.

    Returns the normalized training set, followed by each normalized extra set.
    """
    mean, std = fit_channel_stats(train)
    out = [apply_normalization(train, mean, std)]
    out.extend(apply_normalization(d, mean, std) for d in others)
    return out[0] if not others else tuple(out)


def split(dataset: MTSDataset, ratio: float, seed: int = 0) -> tuple[MTSDataset, MTSDataset]:
    """Stratified split; ``ratio`` of each class goes to the first part."""
    if not 0.0 <= ratio <= 1.0:
        raise ConfigError(f"split ratio must lie in [0, 1], got {ratio}")
    rng = np.random.default_rng(seed)
    first = []
    for k in range(dataset.n_classes):
        members = np.flatnonzero(dataset.y == k)
        members = members[rng.permutation(len(members))]
        first.extend(members[: int(round(ratio * len(members)))])
    first = np.sort(np.array(first, dtype=int))
    second = np.setdiff1d(np.arange(len(dataset)), first)
    return dataset.subset(first), dataset.subset(second)
