"""Per-token context features: embeddings plus a bidirectional LSTM.

Two embedding providers share one interface.  The learned provider owns a
trainable lookup table with a dedicated UNK row; the external provider
serves frozen per-token vectors from an embedding file keyed by sentence id.
Either way the sentence surface becomes an L x dim matrix that the BiLSTM
turns into an L x 2H context representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import (Tensor, ShapeError, concat, embedding_lookup,
                       parameter, sigmoid, slice_rows, tanh)
from .embfile import read_embeddings
from .params import bias, weight

UNK_TOKEN = "<unk>"
DEFAULT_EMBED_DIM = 300
DEFAULT_HIDDEN = 150


class EmbeddingError(ValueError):
    """Provider misconfiguration or a sentence the provider cannot serve."""


def build_vocab(sentences):
    """Token -> row map in first-encounter order; row 0 is the UNK row."""
    vocab = {UNK_TOKEN: 0}
    for sentence in sentences:
        for token in sentence.tokens:
            if token not in vocab:
                vocab[token] = len(vocab)
    return vocab


class LearnedEmbedding:
    """Trainable lookup table, one row per vocabulary entry."""

    mode = "learned-lookup"

    def __init__(self, vocab, dim=DEFAULT_EMBED_DIM, seed=0):
        if vocab.get(UNK_TOKEN) != 0:
            raise EmbeddingError("vocab must reserve row 0 for the UNK token")
        self.vocab = vocab
        self.dim = dim
        rng = np.random.default_rng(seed)
        table = rng.uniform(-0.1, 0.1, size=(len(vocab), dim)).astype(np.float32)
        self.table = parameter(table)

    def embed(self, sentence):
        ids = np.array([self.vocab.get(t, 0) for t in sentence.tokens], dtype=np.int64)
        return embedding_lookup(self.table, ids)

    def named_tensors(self):
        return {"embed.table": self.table}


class ExternalEmbedding:
    """Frozen contextual vectors loaded from an embedding file."""

    mode = "external-contextual"

    def __init__(self, path, expected_dim=768):
        dim, table = read_embeddings(path)
        if dim != expected_dim:
            raise EmbeddingError(
                f"dim mismatch: file has {dim}, config expects {expected_dim}")
        self.dim = dim
        self._table = table

    def embed(self, sentence):
        if sentence.id not in self._table:
            raise EmbeddingError(f"missing sentence id {sentence.id!r} in embedding file")
        vectors = self._table[sentence.id]
        if vectors.shape[0] != len(sentence):
            raise EmbeddingError(
                f"{sentence.id}: token/vector count mismatch "
                f"({len(sentence)} tokens, {vectors.shape[0]} vectors)")
        return Tensor(vectors)

    def named_tensors(self):
        return {}


@dataclass
class LSTMDirection:
    W_i: Tensor
    U_i: Tensor
    b_i: Tensor
    W_f: Tensor
    U_f: Tensor
    b_f: Tensor
    W_o: Tensor
    U_o: Tensor
    b_o: Tensor
    W_c: Tensor
    U_c: Tensor
    b_c: Tensor


@dataclass
class BiLSTMParams:
    fwd: LSTMDirection
    bwd: LSTMDirection
    input_dim: int
    hidden: int


def _init_direction(rng, input_dim, hidden):
    def gate(bias_value=0.0):
        return (weight(rng, input_dim, hidden), weight(rng, hidden, hidden),
                bias(hidden, bias_value))

    W_i, U_i, b_i = gate()
    # forget bias starts at 1 so early training does not erase state
    W_f, U_f, b_f = gate(1.0)
    W_o, U_o, b_o = gate()
    W_c, U_c, b_c = gate()
    return LSTMDirection(W_i, U_i, b_i, W_f, U_f, b_f,
                         W_o, U_o, b_o, W_c, U_c, b_c)


def init_bilstm(input_dim, hidden=DEFAULT_HIDDEN, seed=0):
    rng = np.random.default_rng(seed)
    return BiLSTMParams(fwd=_init_direction(rng, input_dim, hidden),
                        bwd=_init_direction(rng, input_dim, hidden),
                        input_dim=input_dim, hidden=hidden)


def _run_direction(x, p, hidden, times):
    length = x.data.shape[0]
    pre_i = x @ p.W_i + p.b_i
    pre_f = x @ p.W_f + p.b_f
    pre_o = x @ p.W_o + p.b_o
    pre_c = x @ p.W_c + p.b_c
    h = Tensor(np.zeros((1, hidden), dtype=np.float32))
    c = Tensor(np.zeros((1, hidden), dtype=np.float32))
    outputs = [None] * length
    for t in times:
        gate_i = sigmoid(slice_rows(pre_i, t, t + 1) + h @ p.U_i)
        gate_f = sigmoid(slice_rows(pre_f, t, t + 1) + h @ p.U_f)
        gate_o = sigmoid(slice_rows(pre_o, t, t + 1) + h @ p.U_o)
        cand = tanh(slice_rows(pre_c, t, t + 1) + h @ p.U_c)
        c = gate_f * c + gate_i * cand
        h = gate_o * tanh(c)
        outputs[t] = h
    return concat(outputs, axis=0)


def bilstm_forward(x, params):
    """L x dim input to L x 2H output, both directions concatenated."""
    if x.data.ndim != 2 or x.data.shape[1] != params.input_dim:
        raise ShapeError(
            f"bilstm expects (L, {params.input_dim}), got {x.data.shape}")
    length = x.data.shape[0]
    fwd = _run_direction(x, params.fwd, params.hidden, range(length))
    bwd = _run_direction(x, params.bwd, params.hidden, range(length - 1, -1, -1))
    return concat([fwd, bwd], axis=1)
