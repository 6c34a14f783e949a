"""Binary per-token embedding files (TCEMB1).

Layout, little-endian throughout: magic ``TCEMB1`` (6 bytes), u32 dim,
u32 sentence count; then per sentence a u16 id byte length, the UTF-8 id,
a u16 token count L, and L x dim float32 values row-major.  The reader
validates the magic and that the payload ends exactly at end of file.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"TCEMB1"


class EmbeddingFileError(ValueError):
    """Raised when an embedding file is malformed or truncated."""


def write_embeddings(path, entries, dim):
    """Write (sentence_id, L x dim float32 array) pairs to ``path``.

    ``entries`` may be any iterable; insertion order is preserved in the
    file.  Ids must be unique and encode to at most 65535 UTF-8 bytes.
    """
    chunks = []
    count = 0
    seen = set()
    for sid, vectors in entries:
        arr = np.asarray(vectors, dtype=np.float32)
        if arr.ndim != 2 or arr.shape[1] != dim:
            raise EmbeddingFileError(
                f"{sid}: expected (L, {dim}) vectors, got {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[0] > 0xFFFF:
            raise EmbeddingFileError(f"{sid}: token count {arr.shape[0]} out of range")
        if sid in seen:
            raise EmbeddingFileError(f"duplicate sentence id {sid!r}")
        seen.add(sid)
        id_bytes = sid.encode("utf-8")
        if not id_bytes or len(id_bytes) > 0xFFFF:
            raise EmbeddingFileError(f"sentence id length out of range: {sid!r}")
        chunks.append(struct.pack("<H", len(id_bytes)))
        chunks.append(id_bytes)
        chunks.append(struct.pack("<H", arr.shape[0]))
        chunks.append(np.ascontiguousarray(arr).astype("<f4").tobytes())
        count += 1
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", dim, count))
        for chunk in chunks:
            fh.write(chunk)


def read_embeddings(path):
    """Read a TCEMB1 file into (dim, {sentence_id: L x dim float32 array})."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 8:
        raise EmbeddingFileError("file too short for header")
    if blob[:len(MAGIC)] != MAGIC:
        raise EmbeddingFileError("bad magic: not an embedding file")
    dim, count = struct.unpack_from("<II", blob, len(MAGIC))
    offset = len(MAGIC) + 8
    table = {}
    for _ in range(count):
        if offset + 2 > len(blob):
            raise EmbeddingFileError("truncated sentence header")
        (id_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        if offset + id_len + 2 > len(blob):
            raise EmbeddingFileError("truncated sentence id")
        sid = blob[offset:offset + id_len].decode("utf-8")
        offset += id_len
        (length,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        payload = 4 * dim * length
        if offset + payload > len(blob):
            raise EmbeddingFileError(f"{sid}: truncated vector block")
        arr = np.frombuffer(blob, dtype="<f4", count=dim * length, offset=offset)
        table[sid] = arr.reshape(length, dim).astype(np.float32)
        offset += payload
    if offset != len(blob):
        raise EmbeddingFileError(
            f"trailing bytes: expected length {offset}, file has {len(blob)}")
    if len(table) != count:
        raise EmbeddingFileError("duplicate sentence ids in file")
    return dim, table
