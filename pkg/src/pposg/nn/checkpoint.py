"""Single-file checkpoint format.

Layout: 6-byte magic "PPOSG1", an 8-byte little-endian manifest length,
a JSON manifest (tensor names, shapes, dtypes, byte offsets, plus a free-form
"meta" dict), then the raw little-endian tensor blob.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"PPOSG1"

_DTYPES = {"f4": "<f4", "f8": "<f8", "i8": "<i8", "u4": "<u4", "u8": "<u8"}


class CheckpointFormatError(Exception):
    pass


def save_checkpoint(path: str, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    entries = []
    blobs = []
    offset = 0
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name])
        if arr.dtype == np.float32:
            code = "f4"
        elif arr.dtype == np.float64:
            code = "f8"
        elif arr.dtype == np.int64:
            code = "i8"
        elif arr.dtype == np.uint32:
            code = "u4"
        elif arr.dtype == np.uint64:
            code = "u8"
        else:
            raise CheckpointFormatError(f"unsupported dtype {arr.dtype} for {name!r}")
        blob = arr.astype(_DTYPES[code]).tobytes()
        entries.append({"name": name, "shape": list(arr.shape),
                        "dtype": code, "offset": offset})
        blobs.append(blob)
        offset += len(blob)
    manifest = json.dumps({"tensors": entries, "meta": meta or {}},
                          sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(manifest)))
        fh.write(manifest)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path: str) -> tuple[dict[str, np.ndarray], dict]:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise CheckpointFormatError(
                f"bad magic {magic!r}, expected {MAGIC.decode()} file")
        header = fh.read(8)
        if len(header) != 8:
            raise CheckpointFormatError("truncated header")
        (mlen,) = struct.unpack("<Q", header)
        raw = fh.read(mlen)
        if len(raw) != mlen:
            raise CheckpointFormatError("truncated manifest")
        try:
            manifest = json.loads(raw)
        except json.JSONDecodeError as e:
            raise CheckpointFormatError(f"corrupt manifest: {e}") from e
        blob = fh.read()
    tensors: dict[str, np.ndarray] = {}
    for entry in manifest["tensors"]:
        dt = np.dtype(_DTYPES[entry["dtype"]])
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        start = entry["offset"]
        if start + count * dt.itemsize > len(blob):
            raise CheckpointFormatError(
                f"truncated blob: tensor {entry['name']!r} extends past EOF")
        arr = np.frombuffer(blob, dtype=dt, count=count, offset=start)
        tensors[entry["name"]] = arr.reshape(entry["shape"]).copy()
    return tensors, manifest["meta"]
