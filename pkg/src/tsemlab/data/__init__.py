"""Dataset containers, file formats, preprocessing and the synthetic generator."""

from __future__ import annotations

from pathlib import Path

from ..errors import DataError
from .csvio import load_csv, save_csv, write_matrix_csv
from .dataset import MTSDataset
from .synthetic import SyntheticSpec, generate_synthetic
from .transforms import apply_normalization, fit_channel_stats, split, z_normalize
from .uea import load_uea_text, write_uea_text


def load_dataset(path, part: str = "train") -> MTSDataset:
    """Load one part ("train" or "test") of a dataset on disk.

    Accepted layouts: a single ``.ts`` file; a directory with ``train/`` and
    ``test/`` CSV subdirectories; a directory holding ``*_TRAIN.ts`` and
    ``*_TEST.ts``; or a bare CSV directory (returned for either part).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset path {path} does not exist")
    if path.is_file():
        return load_uea_text(path)
    sub = path / part
    if (sub / "labels.csv").is_file():
        return load_csv(sub)
    matches = sorted(path.glob(f"*_{part.upper()}.ts"))
    if matches:
        return load_uea_text(matches[0])
    if (path / "labels.csv").is_file():
        return load_csv(path)
    raise DataError(f"no {part} split found under {path}")


__all__ = [
    "MTSDataset",
    "SyntheticSpec",
    "apply_normalization",
    "fit_channel_stats",
    "generate_synthetic",
    "load_csv",
    "load_dataset",
    "load_uea_text",
    "save_csv",
    "split",
    "write_matrix_csv",
    "write_uea_text",
    "z_normalize",
]
