"""Subword-to-word alignment for exported embedding files."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STRATEGIES = ("first-subword", "mean-subword")
FLAG_TO_STRATEGY = {"first": "first-subword", "mean": "mean-subword"}


class TokenizationError(ValueError):
    """Raised when a word token cannot be split into subword pieces."""


@dataclass(frozen=True)
class AlignmentPolicy:
    """How per-subword vectors become one vector per word token.

    ``first-subword`` keeps the leading piece's vector; ``mean-subword``
    (the default) averages all pieces of the word. Either way the output
    has exactly one vector per word token.
    """

    strategy: str = "mean-subword"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; "
                             f"choose from {', '.join(STRATEGIES)}")

    @classmethod
    def from_flag(cls, flag):
        if flag not in FLAG_TO_STRATEGY:
            raise ValueError(f"unknown policy flag {flag!r}; choose mean or first")
        return cls(FLAG_TO_STRATEGY[flag])


def sentence_pieces(encoder, tokens):
    """Split every word and record its (start, end) span in the piece list.

    Spans index the flat piece list without boundary markers, so they can
    be applied directly to boundary-stripped encoder output.
    """
    pieces = []
    spans = []
    for token in tokens:
        sub = encoder.split(token)
        if not sub:
            raise TokenizationError(f"token {token!r} produced no pieces")
        spans.append((len(pieces), len(pieces) + len(sub)))
        pieces.extend(sub)
    return pieces, spans


def pool(vectors, spans, policy):
    """One float32 vector per word from per-subword vectors."""
    rows = np.empty((len(spans), vectors.shape[1]), dtype=np.float32)
    for k, (start, end) in enumerate(spans):
        if policy.strategy == "first-subword":
            rows[k] = vectors[start]
        else:
            rows[k] = vectors[start:end].astype(np.float64).mean(axis=0)
    return rows
