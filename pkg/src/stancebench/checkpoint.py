"""Binary checkpoint container: named f64 tensors with a JSON header.

Layout: 8-byte magic, little-endian u64 header length, UTF-8 JSON header,
then the raw tensor payloads back to back. The header records name, shape,
frozen flag and payload offsets for every tensor.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"STBNCH01"


def save_tensors(
    path: str | Path,
    tensors: dict[str, np.ndarray],
    frozen: dict[str, bool] | None = None,
) -> None:
    frozen = frozen or {}
    entries = []
    offset = 0
    payloads: list[bytes] = []
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype=np.float64)
        raw = arr.tobytes()
        entries.append({
            "name": name,
            "shape": list(arr.shape),
            "frozen": bool(frozen.get(name, False)),
            "offset": offset,
            "nbytes": len(raw),
        })
        payloads.append(raw)
        offset += len(raw)
    header = json.dumps({"tensors": entries}, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for raw in payloads:
            fh.write(raw)


def load_tensors(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, bool]]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"not a checkpoint file: bad magic {magic!r}")
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        payload = fh.read()
    tensors: dict[str, np.ndarray] = {}
    frozen: dict[str, bool] = {}
    for entry in header["tensors"]:
        raw = payload[entry["offset"]: entry["offset"] + entry["nbytes"]]
        tensors[entry["name"]] = np.frombuffer(raw, dtype=np.float64).reshape(entry["shape"]).copy()
        frozen[entry["name"]] = entry["frozen"]
    return tensors, frozen


def hash_tensors(tensors: dict[str, np.ndarray], names: list[str] | None = None) -> str:
    """Order-independent byte hash of the selected tensors (all when names is None)."""
    digest = hashlib.sha256()
    for name in sorted(names if names is not None else tensors):
        arr = np.ascontiguousarray(tensors[name], dtype=np.float64)
        digest.update(name.encode("utf-8"))
        digest.update(str(arr.shape).encode("utf-8"))
        digest.update(arr.tobytes())
    return digest.hexdigest()
