"""Versioned checkpoint files (TCCKPT1) with a JSON metadata sidecar.

Binary layout, little-endian: magic ``TCCKPT1``, u32 entry count; per entry
a u16 name length, UTF-8 name, u8 rank, rank u32 dims, then the float32
data row-major; the file ends with a u32 CRC32 of every preceding byte.

The binary file holds only named float tensors.  Everything needed to
rebuild the surrounding model (config, vocabulary, causal graph, loss
curve) rides in ``<path>.meta.json`` next to it.
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

MAGIC = b"TCCKPT1"


class CheckpointError(ValueError):
    """Raised when a checkpoint file is malformed or corrupt."""


def meta_path(path):
    return str(path) + ".meta.json"


def save_checkpoint(path, tensors, meta=None):
    """Write named arrays (or Tensors) plus an optional metadata sidecar."""
    body = bytearray()
    body += MAGIC
    body += struct.pack("<I", len(tensors))
    for name, value in tensors.items():
        arr = np.asarray(getattr(value, "data", value), dtype=np.float32)
        name_bytes = name.encode("utf-8")
        if not name_bytes or len(name_bytes) > 0xFFFF:
            raise CheckpointError(f"tensor name length out of range: {name!r}")
        if arr.ndim > 0xFF:
            raise CheckpointError(f"{name}: rank {arr.ndim} out of range")
        body += struct.pack("<H", len(name_bytes))
        body += name_bytes
        body += struct.pack("<B", arr.ndim)
        for dim in arr.shape:
            body += struct.pack("<I", dim)
        body += np.ascontiguousarray(arr).astype("<f4").tobytes()
    body += struct.pack("<I", zlib.crc32(bytes(body)))
    with open(path, "wb") as fh:
        fh.write(bytes(body))
    if meta is not None:
        with open(meta_path(path), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_checkpoint(path):
    """Read a checkpoint into ({name: float32 array}, meta dict or None)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 8:
        raise CheckpointError("file too short for header and trailer")
    if blob[:len(MAGIC)] != MAGIC:
        raise CheckpointError("bad magic: not a checkpoint file")
    (stored_crc,) = struct.unpack_from("<I", blob, len(blob) - 4)
    if zlib.crc32(blob[:-4]) != stored_crc:
        raise CheckpointError("CRC mismatch: checkpoint is corrupt")
    (count,) = struct.unpack_from("<I", blob, len(MAGIC))
    offset = len(MAGIC) + 4
    end = len(blob) - 4
    tensors = {}
    for _ in range(count):
        if offset + 2 > end:
            raise CheckpointError("truncated entry header")
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        if offset + name_len + 1 > end:
            raise CheckpointError("truncated entry name")
        name = blob[offset:offset + name_len].decode("utf-8")
        offset += name_len
        (rank,) = struct.unpack_from("<B", blob, offset)
        offset += 1
        if offset + 4 * rank > end:
            raise CheckpointError(f"{name}: truncated dims")
        dims = struct.unpack_from(f"<{rank}I", blob, offset) if rank else ()
        offset += 4 * rank
        size = int(np.prod(dims, dtype=np.int64)) if rank else 1
        payload = 4 * size
        if offset + payload > end:
            raise CheckpointError(f"{name}: truncated data")
        arr = np.frombuffer(blob, dtype="<f4", count=size, offset=offset)
        tensors[name] = arr.reshape(dims).astype(np.float32)
        offset += payload
    if offset != end:
        raise CheckpointError("trailing bytes before CRC")
    if len(tensors) != count:
        raise CheckpointError("duplicate tensor names in checkpoint")
    meta = None
    try:
        with open(meta_path(path), "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        pass
    return tensors, meta


def restore_into(model, tensors):
    """Copy loaded arrays into a freshly built model's parameters."""
    named = model.named_tensors()
    missing = sorted(set(named) - set(tensors))
    extra = sorted(set(tensors) - set(named))
    if missing or extra:
        raise CheckpointError(
            f"parameter names do not match: missing {missing}, extra {extra}")
    for name, tensor in named.items():
        arr = tensors[name]
        if arr.shape != tensor.data.shape:
            raise CheckpointError(
                f"{name}: shape {arr.shape} does not match model "
                f"{tensor.data.shape}")
        tensor.data = arr.copy()
