"""Binary checkpoint container (byte layout in docs/checkpoint.md)."""
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import CheckpointError

MAGIC = b"FXLCKPT\x00"
VERSION = 1
_HEAD = struct.Struct("<8sIQ")


def save_checkpoint(path, tensors: dict[str, np.ndarray], meta: dict) -> None:
    entries, offset = [], 0
    for name, arr in tensors.items():
        count = int(np.prod(arr.shape)) if arr.ndim else 1
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset, "count": count})
        offset += count
    header = json.dumps({"meta": meta, "tensors": entries}, sort_keys=True, separators=(",", ":")).encode("utf-8")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, VERSION, len(header)))
        fh.write(header)
        for arr in tensors.values():
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    blob = Path(path).read_bytes()
    if len(blob) < _HEAD.size:
        raise CheckpointError(f"{path}: truncated checkpoint")
    magic, version, header_len = _HEAD.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    start = _HEAD.size + header_len
    header = json.loads(blob[_HEAD.size:start].decode("utf-8"))
    payload = np.frombuffer(blob, dtype="<f8", offset=start)
    tensors = {}
    for entry in header["tensors"]:
        lo = entry["offset"]
        chunk = payload[lo:lo + entry["count"]]
        if chunk.size != entry["count"]:
            raise CheckpointError(f"{path}: payload too short for {entry['name']}")
        tensors[entry["name"]] = chunk.astype(np.float64).reshape(entry["shape"])
    return tensors, header["meta"]
