from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from ..errors import ConfigError

ARCHITECTURES = ("mtexcnn", "xcm", "tsem")
MAX_WINDOW = 500


def window_from_fraction(fraction: float, seq_length: int) -> int:
    """Round ``fraction * seq_length`` half-up, then clamp into [1, min(T, 500)]."""
    raw = math.floor(fraction * seq_length + 0.5)
    return max(1, min(raw, MAX_WINDOW, seq_length))


@dataclass(frozen=True)
class ModelConfig:
    n_features: int
    seq_length: int
    n_classes: int
    architecture: str = "tsem"
    window_fraction: float = 0.2
    window_override: int | None = None
    filters_2d: int = 16
    filters_1d: int = 16
    seed: int = 0

    def __post_init__(self):
        self.validate()

    @property
    def window_size(self) -> int:
        if self.window_override is not None:
            return int(self.window_override)
        return window_from_fraction(self.window_fraction, self.seq_length)

    def validate(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {self.architecture!r}; choose from {', '.join(ARCHITECTURES)}")
        for name in ("n_features", "seq_length", "n_classes", "filters_2d", "filters_1d"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.n_classes < 2:
            raise ConfigError("need at least two classes")
        if not 0.0 < self.window_fraction <= 1.0:
            raise ConfigError(f"window_fraction must lie in (0, 1], got {self.window_fraction}")
        w = self.window_size
        if not 1 <= w <= min(self.seq_length, MAX_WINDOW):
            raise ConfigError(f"window size {w} must lie in [1, min(T={self.seq_length}, {MAX_WINDOW})]")
        if self.seed < 0:
            raise ConfigError("seed must be unsigned")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        return cls(**data)
