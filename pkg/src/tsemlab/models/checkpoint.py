"""Binary checkpoint container.

Layout (all integers little-endian)::

    4 bytes   magic b"TSEM"
    uint16    format version (currently 1)
    uint32    header length H in bytes
    H bytes   UTF-8 JSON header:
                {"config": {...ModelConfig fields...},
                 "blocks": [[name, [shape...]], ...],
                 "extra": {...},            # e.g. normalization stats, class names
                 "payload_crc32": int}
    payload   every block in header order as raw little-endian float64
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import CheckpointError, CheckpointVersionError, DimensionError
from .config import ModelConfig
from .graph import ModelGraph, build_model

MAGIC = b"TSEM"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def save_model(model: ModelGraph, path, extra: dict | None = None) -> None:
    arrays = model.state_arrays()
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays.values())
    header = {
        "config": model.config.to_dict(),
        "blocks": [[name, list(a.shape)] for name, a in arrays.items()],
        "extra": extra or {},
        "payload_crc32": zlib.crc32(payload),
    }
    raw = json.dumps(header, sort_keys=True).encode("utf-8")
    Path(path).write_bytes(_PREFIX.pack(MAGIC, FORMAT_VERSION, len(raw)) + raw + payload)


def read_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Parse a checkpoint into its header and named arrays without building a model."""
    blob = Path(path).read_bytes()
    if len(blob) < _PREFIX.size:
        if not MAGIC.startswith(blob[:4]):
            raise CheckpointVersionError(f"{path}: not a checkpoint (bad magic bytes)")
        raise CheckpointError(f"{path}: truncated before the header")
    magic, version, hlen = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointVersionError(f"{path}: not a checkpoint (bad magic bytes {magic!r})")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(f"{path}: format version {version}, this build reads {FORMAT_VERSION}")
    end = _PREFIX.size + hlen
    if len(blob) < end:
        raise CheckpointError(f"{path}: truncated inside the header")
    try:
        header = json.loads(blob[_PREFIX.size : end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: header is not valid JSON ({exc})") from None
    arrays: dict[str, np.ndarray] = {}
    offset = end
    for name, shape in header["blocks"]:
        nbytes = 8 * int(np.prod(shape, dtype=np.int64))
        if len(blob) < offset + nbytes:
            raise CheckpointError(f"{path}: truncated in block {name!r}")
        arrays[name] = np.frombuffer(blob, dtype="<f8", count=nbytes // 8, offset=offset).reshape(shape).astype(np.float64)
        offset += nbytes
    if offset != len(blob):
        raise CheckpointError(f"{path}: {len(blob) - offset} trailing bytes after the last block")
    if zlib.crc32(blob[end:]) != header.get("payload_crc32"):
        raise CheckpointError(f"{path}: payload checksum mismatch")
    return header, arrays


def load_model(path, expect: ModelConfig | None = None) -> tuple[ModelGraph, dict]:
    """Rebuild a model from ``path``; returns the model and the header's ``extra`` dict.

    With ``expect`` set, a checkpoint whose dimensions differ raises
    :class:`DimensionError`.
    """
    header, arrays = read_checkpoint(path)
    config = ModelConfig.from_dict(header["config"])
    if expect is not None:
        for key in ("n_features", "seq_length", "n_classes", "architecture"):
            if getattr(expect, key) != getattr(config, key):
                raise DimensionError(
                    f"checkpoint {key}={getattr(config, key)!r} does not match expected {getattr(expect, key)!r}"
                )
    model = build_model(config)
    model.load_state_arrays(arrays)
    return model, header.get("extra", {})
