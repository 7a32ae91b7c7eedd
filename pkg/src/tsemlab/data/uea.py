"""Reader and writer for the UEA/UCR ``.ts`` text format.

Header directives start with ``@`` and end at ``@data``; each data line holds
one instance with channels separated by ``:`` and values by ``,``, followed by
the class label as the last ``:`` field. Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..errors import ParseError
from .dataset import MTSDataset

_MISSING_TOKENS = {"?", "nan", "na", ""}


def _parse_bool(token: str, directive: str, lineno: int, path) -> bool:
    t = token.lower()
    if t == "true":
        return True
    if t == "false":
        return False
    raise ParseError(f"invalid value {token!r} for {directive}", lineno, path)


def load_uea_text(path) -> MTSDataset:
    """Parse an equal-length, labelled multivariate ``.ts`` file."""
    path = Path(path)
    header: dict[str, object] = {}
    class_labels: list[str] | None = None
    rows: list[np.ndarray] = []
    labels: list[int] = []
    in_data = False
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not in_data:
                if not line.startswith("@"):
                    raise ParseError("expected a header directive before @data", lineno, path)
                tokens = line.split()
                key = tokens[0].lower()
                if key == "@data":
                    in_data = True
                    if class_labels is None:
                        raise ParseError("@classLabel true <labels> is required before @data", lineno, path)
                    continue
                if key == "@problemname":
                    header["name"] = " ".join(tokens[1:])
                elif key in ("@timestamps", "@missing", "@univariate", "@equallength"):
                    if len(tokens) < 2:
                        raise ParseError(f"{tokens[0]} needs a value", lineno, path)
                    header[key[1:]] = _parse_bool(tokens[1], tokens[0], lineno, path)
                elif key in ("@dimensions", "@dimension"):
                    header["dimensions"] = int(tokens[1])
                elif key == "@serieslength":
                    header["serieslength"] = int(tokens[1])
                elif key == "@classlabel":
                    if len(tokens) < 2 or not _parse_bool(tokens[1], tokens[0], lineno, path):
                        raise ParseError("only labelled files (@classLabel true ...) are supported", lineno, path)
                    if len(tokens) < 3:
                        raise ParseError("@classLabel true must list the class values", lineno, path)
                    class_labels = tokens[2:]
                else:
                    header.setdefault("other", []).append(line)
                if header.get("timestamps"):
                    raise ParseError("timestamped series are not supported", lineno, path)
                if header.get("equallength") is False:
                    raise ParseError("variable-length series are not supported", lineno, path)
                continue

            fields = line.split(":")
            if len(fields) < 2:
                raise ParseError("instance line needs at least one channel and a label", lineno, path)
            label = fields[-1].strip()
            if label not in class_labels:
                raise ParseError(f"unknown class label {label!r}", lineno, path)
            channels = []
            for ch, field in enumerate(fields[:-1]):
                values = []
                for token in field.split(","):
                    tok = token.strip()
                    if tok.lower() in _MISSING_TOKENS:
                        raise ParseError(f"missing value in channel {ch}", lineno, path)
                    try:
                        v = float(tok)
                    except ValueError:
                        raise ParseError(f"non-numeric value {tok!r} in channel {ch}", lineno, path) from None
                    if not math.isfinite(v):
                        raise ParseError(f"non-finite value {tok!r} in channel {ch}", lineno, path)
                    values.append(v)
                channels.append(values)
            n_dims = header.get("dimensions", len(rows[0]) if rows else len(channels))
            if len(channels) != n_dims:
                raise ParseError(f"expected {n_dims} channels, found {len(channels)}", lineno, path)
            lengths = {len(c) for c in channels}
            if len(lengths) != 1:
                raise ParseError(f"ragged channel lengths {sorted(lengths)}", lineno, path)
            length = lengths.pop()
            expected_len = header.get("serieslength", rows[0].shape[1] if rows else length)
            if length != expected_len:
                raise ParseError(f"series length {length} differs from expected {expected_len}", lineno, path)
            rows.append(np.array(channels, dtype=np.float64))
            labels.append(class_labels.index(label))

    if not in_data:
        raise ParseError("end of file reached without an @data section", None, path)
    if not rows:
        raise ParseError("no instances after @data", None, path)
    return MTSDataset(
        X=np.stack(rows),
        y=np.array(labels),
        class_names=tuple(class_labels),
        provenance=f"uea:{path.name}",
        meta={"problem_name": header.get("name", path.stem)},
    )


def write_uea_text(dataset: MTSDataset, path, problem_name: str = "dataset") -> None:
    """Write ``dataset`` so that :func:`load_uea_text` reproduces it bit-exactly."""
    path = Path(path)
    lines = [
        f"@problemName {problem_name}",
        "@timeStamps false",
        "@missing false",
        f"@univariate {'true' if dataset.n_features == 1 else 'false'}",
        f"@dimensions {dataset.n_features}",
        "@equalLength true",
        f"@seriesLength {dataset.seq_length}",
        "@classLabel true " + " ".join(dataset.class_names),
        "@data",
    ]
    for x, label in zip(dataset.X, dataset.y):
        chans = [",".join(repr(float(v)) for v in row) for row in x]
        lines.append(":".join(chans) + ":" + dataset.class_names[label])
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
