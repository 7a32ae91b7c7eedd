from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class MTSDataset:
    """Equal-length multivariate series ``X`` of shape (N, D, T) with integer labels."""

    X: np.ndarray
    y: np.ndarray
    class_names: tuple[str, ...]
    channel_mean: np.ndarray | None = None
    channel_std: np.ndarray | None = None
    provenance: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 3:
            raise DataError(f"instances must form an (N, D, T) array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"{X.shape[0]} instances but {y.shape[0] if y.ndim else 0} labels")
        if not np.isfinite(X).all():
            bad = int(np.argwhere(~np.isfinite(X))[0][0])
            raise DataError(f"instance {bad} contains NaN or infinite values")
        k = len(self.class_names)
        if y.size and (y.min() < 0 or y.max() >= k):
            raise DataError(f"labels must lie in [0, {k})")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "class_names", tuple(str(c) for c in self.class_names))

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def seq_length(self) -> int:
        return self.X.shape[2]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> "MTSDataset":
        idx = np.asarray(indices, dtype=int)
        return replace(self, X=self.X[idx], y=self.y[idx])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)
