"""Frozen encoders producing one vector per subword piece."""

from __future__ import annotations

import hashlib

import numpy as np

from .align import TokenizationError

DIM = 768
PIECE_CHARS = 4
MAX_PIECES = 64


class HashEncoder:
    """Deterministic stand-in for a pretrained contextual encoder.

    Each position's vector is drawn from a PRNG seeded by (name, revision,
    position, piece), so output depends only on the pinned revision and the
    input sequence: the same corpus exports to the same bytes on any
    platform, with no weights to download. Words are split into fixed-width
    chunks with a ``##`` continuation prefix.
    """

    name = "hash-sim-768"
    revision = "1"
    dim = DIM
    bos = "[CLS]"
    eos = "[SEP]"

    def split(self, word):
        if not word:
            raise TokenizationError("cannot tokenize an empty token")
        pieces = [word[i:i + PIECE_CHARS] for i in range(0, len(word), PIECE_CHARS)]
        if len(pieces) > MAX_PIECES:
            raise TokenizationError(
                f"token of {len(word)} chars exceeds {MAX_PIECES} pieces")
        return [pieces[0]] + ["##" + p for p in pieces[1:]]

    def encode(self, pieces):
        out = np.empty((len(pieces), self.dim), dtype=np.float32)
        for pos, piece in enumerate(pieces):
            key = f"{self.name}@{self.revision}|{pos}|{piece}".encode("utf-8")
            seed = int.from_bytes(hashlib.sha256(key).digest()[:8], "little")
            rng = np.random.default_rng(seed)
            out[pos] = rng.standard_normal(self.dim, dtype=np.float32)
        return out


class PretrainedEncoder:
    """Transformer backend; needs the ``pretrained`` extra and model access.

    Weights are frozen and the revision pin is recorded in the manifest;
    fine-tuning is out of scope here.
    """

    def __init__(self, model_name, revision="main"):
        from transformers import AutoModel, AutoTokenizer
        self.name = model_name
        self.revision = revision
        self._tokenizer = AutoTokenizer.from_pretrained(model_name, revision=revision)
        self._model = AutoModel.from_pretrained(model_name, revision=revision)
        self._model.eval()
        self.dim = int(self._model.config.hidden_size)
        self.bos = self._tokenizer.cls_token
        self.eos = self._tokenizer.sep_token

    def split(self, word):
        pieces = self._tokenizer.tokenize(word)
        if not pieces:
            raise TokenizationError(f"cannot tokenize {word!r}")
        return pieces

    def encode(self, pieces):
        import torch
        ids = self._tokenizer.convert_tokens_to_ids(pieces)
        with torch.no_grad():
            hidden = self._model(torch.tensor([ids])).last_hidden_state
        return hidden[0].numpy().astype(np.float32)


def get_encoder(spec="hash", revision="main"):
    """Encoder registry: ``hash`` is the offline deterministic default."""
    if spec == "hash":
        return HashEncoder()
    return PretrainedEncoder(spec, revision)
