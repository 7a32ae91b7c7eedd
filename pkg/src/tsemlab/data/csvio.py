"""Directory-of-CSV dataset layout.

``<dir>/labels.csv`` has a header ``instance_id,label`` and one row per
instance; each instance lives in ``<dir>/<instance_id>.csv`` as a headerless
D-row by T-column matrix.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..errors import DataError, ParseError
from .dataset import MTSDataset

MANIFEST = "labels.csv"


def _class_order(names) -> list[str]:
    unique = sorted(set(names))
    try:
        return sorted(unique, key=float)
    except ValueError:
        return unique


def load_csv(directory) -> MTSDataset:
    directory = Path(directory)
    manifest = directory / MANIFEST
    if not manifest.is_file():
        raise DataError(f"missing manifest {manifest}")
    with manifest.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["instance_id", "label"]:
            raise ParseError("manifest header must be 'instance_id,label'", 1, manifest)
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ParseError("expected two columns", lineno, manifest)
            entries.append((row[0].strip(), row[1].strip(), lineno))
    if not entries:
        raise DataError(f"manifest {manifest} lists no instances")

    class_names = _class_order(label for _, label, _ in entries)
    matrices = []
    for instance_id, _, lineno in entries:
        file = directory / f"{instance_id}.csv"
        if not file.is_file():
            raise ParseError(f"instance file {file.name} not found", lineno, manifest)
        try:
            mat = np.loadtxt(file, delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise ParseError(f"could not parse {file.name}: {exc}", None, file) from None
        if matrices and mat.shape != matrices[0].shape:
            raise ParseError(f"instance shape {mat.shape} differs from {matrices[0].shape}", None, file)
        if not np.isfinite(mat).all():
            raise ParseError("NaN or infinite value", None, file)
        matrices.append(mat)
    return MTSDataset(
        X=np.stack(matrices),
        y=np.array([class_names.index(label) for _, label, _ in entries]),
        class_names=tuple(class_names),
        provenance=f"csv:{directory.name}",
    )


def save_csv(dataset: MTSDataset, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(dataset))))
    with (directory / MANIFEST).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["instance_id", "label"])
        for i, label in enumerate(dataset.y):
            instance_id = f"instance_{i:0{width}d}"
            writer.writerow([instance_id, dataset.class_names[label]])
            write_matrix_csv(dataset.X[i], directory / f"{instance_id}.csv")


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    """Headerless CSV with shortest round-trip float formatting."""
    lines = [",".join(repr(float(v)) for v in row) for row in np.atleast_2d(matrix)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
