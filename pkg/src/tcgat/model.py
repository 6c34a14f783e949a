"""Full token-labeling model: embed, BiLSTM, graph attention, fuse, classify.

Dataflow per sentence: the surface tokens become an L x 300 matrix (learned
lookup, or external vectors through a learned input projection), a BiLSTM
produces the sequence features, the temporal and causal attention layers
each map those to L x 300, and their concatenation is projected against the
contextual branch through the equilibrium gate before the softmax head.

The contextual branch is the raw external vectors when present, otherwise
the BiLSTM output itself.

Variants pick a fuse path and map 1:1 onto the ablation table:

* ``full``           - gated fusion of both branches.
* ``no-context``     - temporal-causal branch only.
* ``no-equilibrium`` - plain sum of the projected branches, no gate.
* ``tgat-only``      - causal slice zeroed at the fuse input.
* ``cgat-only``      - temporal slice zeroed at the fuse input.
* ``context-only``   - contextual branch only, graph layers unused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attention import (cgat_layer, init_cgat, init_tgat, tgat_layer,
                        DEFAULT_ATTN_DROPOUT, DEFAULT_GAT_DIM, DEFAULT_HEADS,
                        DEFAULT_LEAKY_SLOPE)
from .autodiff import Tensor, concat, dropout
from .corpus import CAUSAL_TAGS
from .encoder import (DEFAULT_EMBED_DIM, DEFAULT_HIDDEN, ExternalEmbedding,
                      LearnedEmbedding, bilstm_forward, init_bilstm)
from .fusion import (DEFAULT_FUSE_DIM, classify, equilibrium_fuse,
                     init_classifier, init_equilibrium, token_loss)
from .params import named_tensors, weight

VARIANTS = ("full", "no-context", "no-equilibrium",
            "tgat-only", "cgat-only", "context-only")


@dataclass
class ModelConfig:
    embed_dim: int = DEFAULT_EMBED_DIM
    hidden: int = DEFAULT_HIDDEN
    tgat_dim: int = DEFAULT_GAT_DIM
    tgat_heads: int = DEFAULT_HEADS
    tgat_dropout: float = DEFAULT_ATTN_DROPOUT
    tgat_slope: float = DEFAULT_LEAKY_SLOPE
    cgat_dim: int = DEFAULT_GAT_DIM
    cgat_heads: int = DEFAULT_HEADS
    cgat_dropout: float = DEFAULT_ATTN_DROPOUT
    cgat_slope: float = DEFAULT_LEAKY_SLOPE
    fuse_dim: int = DEFAULT_FUSE_DIM
    ctx_dropout: float = 0.1
    mask_mode: str = "renormalize"
    variant: str = "full"
    external_dim: int = 0

    def validate(self):
        positive = (self.embed_dim, self.hidden, self.tgat_dim,
                    self.tgat_heads, self.cgat_dim, self.cgat_heads,
                    self.fuse_dim)
        if any(v < 1 for v in positive):
            raise ValueError("model dimensions must be positive")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; "
                             f"choose from {', '.join(VARIANTS)}")
        if self.mask_mode not in ("renormalize", "literal"):
            raise ValueError(f"unknown mask mode {self.mask_mode!r}")
        for p in (self.tgat_dropout, self.cgat_dropout, self.ctx_dropout):
            if not 0.0 <= p < 1.0:
                raise ValueError("dropout probabilities must be in [0, 1)")
        if self.external_dim < 0:
            raise ValueError("external_dim must be 0 (learned) or positive")


class TCGATModel:
    """Parameters plus the forward pass for one config."""

    def __init__(self, config, vocab=None, embedding_path=None, seed=0):
        config.validate()
        self.config = config
        rng = np.random.default_rng(seed)
        if config.external_dim:
            if embedding_path is None:
                raise ValueError("external mode needs an embedding file")
            self.provider = ExternalEmbedding(embedding_path, config.external_dim)
            self.P_in = weight(rng, config.external_dim, config.embed_dim)
        else:
            if vocab is None:
                raise ValueError("learned mode needs a vocabulary")
            self.provider = LearnedEmbedding(vocab, config.embed_dim, seed)
            self.P_in = None
        seq_dim = 2 * config.hidden
        ctx_dim = config.external_dim if config.external_dim else seq_dim
        self.bilstm = init_bilstm(config.embed_dim, config.hidden, seed + 1)
        self.tgat = init_tgat(seq_dim, config.tgat_dim, config.tgat_heads,
                              seed + 2, config.tgat_slope,
                              config.tgat_dropout, config.mask_mode)
        self.cgat = init_cgat(seq_dim, config.cgat_dim, config.cgat_heads,
                              seed + 3, config.cgat_slope,
                              config.cgat_dropout, config.mask_mode)
        self._tgat_out = config.tgat_dim * config.tgat_heads
        self._cgat_out = config.cgat_dim * config.cgat_heads
        self.fuse = init_equilibrium(self._tgat_out + self._cgat_out, ctx_dim,
                                     config.fuse_dim, seed + 4)
        self.classifier = init_classifier(config.fuse_dim, len(CAUSAL_TAGS),
                                          seed + 5)

    def named_tensors(self):
        out = dict(self.provider.named_tensors())
        if self.P_in is not None:
            out["embed.P_in"] = self.P_in
        out.update(named_tensors(self.bilstm, "bilstm."))
        out.update(named_tensors(self.tgat, "tgat."))
        out.update(named_tensors(self.cgat, "cgat."))
        out.update(named_tensors(self.fuse, "fuse."))
        out.update(named_tensors(self.classifier, "cls."))
        return out

    def forward_trace(self, sentence, tm, causal_adj, train=False, keys=None):
        """Probabilities plus the intermediate tensors for structural probes."""
        cfg = self.config
        variant = cfg.variant
        x = self.provider.embed(sentence)
        if self.P_in is not None:
            seq_in = x @ self.P_in
        else:
            seq_in = x
        need_graphs = variant != "context-only"
        need_ctx = variant != "no-context"
        h_seq = None
        if need_graphs or not cfg.external_dim:
            h_seq = bilstm_forward(seq_in, self.bilstm)
        ctx_raw = x if cfg.external_dim else h_seq
        length = len(sentence)
        trace = {}

        h_ctx = None
        if need_ctx:
            if train and cfg.ctx_dropout > 0.0:
                if keys is None:
                    raise ValueError("training-mode dropout needs a key allocator")
                seed_, counter = keys.take()
                ctx_raw = dropout(ctx_raw, cfg.ctx_dropout, True, seed_, counter)
            h_ctx = ctx_raw @ self.fuse.P_ctx

        h_tc = None
        if need_graphs:
            if variant == "cgat-only":
                h_T = Tensor(np.zeros((length, self._tgat_out), dtype=np.float32))
            else:
                h_T = tgat_layer(h_seq, tm, self.tgat, train=train, keys=keys)
            if variant == "tgat-only":
                h_C = Tensor(np.zeros((length, self._cgat_out), dtype=np.float32))
            else:
                h_C = cgat_layer(h_seq, causal_adj, self.cgat,
                                 train=train, keys=keys)
            tc = concat([h_T, h_C], axis=1)
            h_tc = tc @ self.fuse.P_tc
            trace["tc"] = tc

        if variant == "context-only":
            fused = h_ctx
        elif variant == "no-context":
            fused = h_tc
        elif variant == "no-equilibrium":
            fused = h_tc + h_ctx
        else:
            fused = equilibrium_fuse(h_tc, h_ctx, self.fuse)
        probs = classify(fused, self.classifier)
        trace.update({"h_tc": h_tc, "h_ctx": h_ctx, "fused": fused})
        return probs, trace

    def forward(self, sentence, tm, causal_adj, train=False, keys=None):
        probs, _ = self.forward_trace(sentence, tm, causal_adj, train, keys)
        return probs

    def sentence_loss(self, sentence, tm, causal_adj, train=False, keys=None):
        probs = self.forward(sentence, tm, causal_adj, train=train, keys=keys)
        return token_loss(probs, sentence.causal_tags)

    def predict_tags(self, sentence, tm, causal_adj):
        probs = self.forward(sentence, tm, causal_adj)
        picks = probs.data.argmax(axis=1)
        return [CAUSAL_TAGS[int(k)] for k in picks]
