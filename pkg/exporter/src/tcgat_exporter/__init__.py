"""Per-token contextual embedding export for JSONL corpora."""

from .align import AlignmentPolicy, TokenizationError
from .encoder import HashEncoder, PretrainedEncoder, get_encoder
from .export import (ExportError, ExportReport, export, read_corpus,
                     write_embedding_file)

__all__ = [
    "AlignmentPolicy",
    "TokenizationError",
    "HashEncoder",
    "PretrainedEncoder",
    "get_encoder",
    "ExportError",
    "ExportReport",
    "export",
    "read_corpus",
    "write_embedding_file",
]
