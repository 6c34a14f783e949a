"""Corpus-to-embedding-file export.

The output layout, little-endian throughout: magic ``TCEMB1`` (6 bytes),
u32 dim, u32 sentence count; then per sentence a u16 id byte length, the
UTF-8 id, a u16 vector count L, and L x dim float32 values row-major.
A sibling ``<out>.manifest.json`` pins the encoder name, revision, and
alignment policy that produced the file.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .align import AlignmentPolicy, TokenizationError, pool, sentence_pieces
from .encoder import HashEncoder

MAGIC = b"TCEMB1"


class ExportError(ValueError):
    """Raised for unreadable or invalid corpus input."""


@dataclass
class ExportReport:
    out_path: str
    manifest_path: str
    written: int
    skipped: list = field(default_factory=list)

    @property
    def clean(self):
        return not self.skipped


def read_corpus(path):
    """Minimal JSONL reader: (id, tokens) pairs in file order.

    Only the fields the exporter needs are checked; full validation is the
    corpus producer's job.
    """
    sentences = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExportError(f"{path}:{line_no}: not valid JSON ({exc.msg})")
            if not isinstance(record, dict):
                raise ExportError(f"{path}:{line_no}: record is not an object")
            sid = record.get("id")
            tokens = record.get("tokens")
            if not isinstance(sid, str) or not sid:
                raise ExportError(f"{path}:{line_no}: missing or empty id")
            if (not isinstance(tokens, list) or not tokens
                    or not all(isinstance(t, str) for t in tokens)):
                raise ExportError(f"{path}:{line_no}: tokens must be a "
                                  "non-empty list of strings")
            if sid in seen:
                raise ExportError(f"{path}:{line_no}: duplicate sentence id {sid!r}")
            seen.add(sid)
            sentences.append((sid, tokens))
    return sentences


def write_embedding_file(path, entries, dim):
    """Write (sentence_id, L x dim float32 array) pairs in order."""
    chunks = [MAGIC, struct.pack("<II", dim, len(entries))]
    for sid, vectors in entries:
        raw = sid.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ExportError(f"{sid[:40]!r}...: id longer than 65535 bytes")
        if vectors.shape[0] > 0xFFFF:
            raise ExportError(f"{sid}: too many vectors for the format")
        chunks.append(struct.pack("<H", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<H", vectors.shape[0]))
        chunks.append(np.ascontiguousarray(vectors, dtype="<f4").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(chunks))


def export(corpus, out, policy=None, encoder=None):
    """Encode every corpus sentence and write the embedding file.

    Sentences whose tokens cannot be split are skipped and listed on the
    report; everything else is written in corpus order.
    """
    policy = policy if policy is not None else AlignmentPolicy()
    encoder = encoder if encoder is not None else HashEncoder()
    entries = []
    skipped = []
    for sid, tokens in read_corpus(corpus):
        try:
            pieces, spans = sentence_pieces(encoder, tokens)
        except TokenizationError:
            skipped.append(sid)
            continue
        vectors = encoder.encode([encoder.bos] + pieces + [encoder.eos])
        entries.append((sid, pool(vectors[1:-1], spans, policy)))
    write_embedding_file(out, entries, encoder.dim)

    manifest_path = f"{out}.manifest.json"
    manifest = {"model": encoder.name, "revision": encoder.revision,
                "policy": policy.strategy}
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ExportReport(out_path=str(out), manifest_path=manifest_path,
                        written=len(entries), skipped=skipped)
