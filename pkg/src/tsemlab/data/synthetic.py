"""Bump-gesture generator with known ground-truth saliency.

Class ``k`` adds a Gaussian bump to channel ``k mod D``, centred at
``T * (1 + 2 * floor(k / D)) / (2 * ceil(K / D))``. Everything outside the bump
is i.i.d. Gaussian noise, so the only class evidence is the bump itself.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigError
from .dataset import MTSDataset


@dataclass(frozen=True)
class SyntheticSpec:
    n_features: int = 3
    seq_length: int = 64
    n_classes: int = 6
    bump_width: float = 3.0
    amplitude: float = 2.0
    noise: float = 0.3
    n_per_class: int = 100
    seed: int = 0

    def validate(self) -> None:
        if min(self.n_features, self.seq_length, self.n_classes, self.n_per_class) < 1:
            raise ConfigError("n_features, seq_length, n_classes and n_per_class must be positive")
        if self.bump_width <= 0 or self.noise < 0:
            raise ConfigError("bump_width must be positive and noise non-negative")
        for k in range(self.n_classes):
            c = self.center(k)
            lo, hi = c - 2 * self.bump_width, c + 2 * self.bump_width
            if lo < 0 or hi > self.seq_length - 1:
                raise ConfigError(
                    f"class {k}: bump window [{lo:g}, {hi:g}] falls outside [0, {self.seq_length})"
                )

    def channel(self, k: int) -> int:
        return k % self.n_features

    def center(self, k: int) -> float:
        slots = math.ceil(self.n_classes / self.n_features)
        return self.seq_length * (1 + 2 * (k // self.n_features)) / (2 * slots)

    def bump(self, k: int) -> np.ndarray:
        t = np.arange(self.seq_length)
        return self.amplitude * np.exp(-((t - self.center(k)) ** 2) / (2 * self.bump_width**2))

    def region_mask(self, k: int) -> np.ndarray:
        """Boolean (D, T) mask of the cells within two bump widths of the centre."""
        mask = np.zeros((self.n_features, self.seq_length), dtype=bool)
        t = np.arange(self.seq_length)
        mask[self.channel(k)] = np.abs(t - self.center(k)) <= 2 * self.bump_width
        return mask

    def to_dict(self) -> dict:
        return asdict(self)


def generate_synthetic(spec: SyntheticSpec) -> MTSDataset:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.n_classes * spec.n_per_class
    labels = np.repeat(np.arange(spec.n_classes), spec.n_per_class)
    labels = labels[rng.permutation(n)]
    X = rng.standard_normal((n, spec.n_features, spec.seq_length)) * spec.noise
    for k in range(spec.n_classes):
        X[labels == k, spec.channel(k)] += spec.bump(k)
    return MTSDataset(
        X=X,
        y=labels,
        class_names=tuple(str(k) for k in range(spec.n_classes)),
        provenance=f"synthetic:seed={spec.seed}",
        meta={"synthetic_spec": spec.to_dict()},
    )
