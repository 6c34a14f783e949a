"""Masked multi-head graph attention over temporal and causal adjacency.

The temporal layer runs six relation branches per head.  Within a branch,
pairwise scores pair the M-state projection of the attending token with the
relation projection of the attended token; attention is a masked softmax of
the leaky-rectified scores restricted to that relation's adjacency row, and
branch outputs are summed in fixed relation order before the ELU.  Heads
are concatenated.

The causal layer is the single-relation special case over the sentence
causal adjacency, with the same projection serving both score sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import (Tensor, concat, dropout, elu, leaky_relu,
                       masked_softmax, slice_rows, transpose)
from .graphs import RELATION_ORDER
from .params import weight

DEFAULT_GAT_DIM = 100
DEFAULT_HEADS = 3
DEFAULT_LEAKY_SLOPE = 0.008
DEFAULT_ATTN_DROPOUT = 0.15


@dataclass
class TGATHead:
    W_B: Tensor
    W_A: Tensor
    W_S: Tensor
    W_I: Tensor
    W_M: Tensor
    W_N: Tensor
    a: Tensor

    def relation_weight(self, relation):
        return getattr(self, "W_" + relation)


@dataclass
class TGATParams:
    heads: list
    dim: int
    leaky_slope: float = DEFAULT_LEAKY_SLOPE
    dropout: float = DEFAULT_ATTN_DROPOUT
    mask_mode: str = "renormalize"

    def __post_init__(self):
        if not self.heads:
            raise ValueError("need at least one attention head")
        if self.leaky_slope <= 0:
            raise ValueError("leaky slope must be positive")
        shapes = {h.relation_weight(r).shape for h in self.heads for r in RELATION_ORDER}
        if len(shapes) != 1:
            raise ValueError("per-relation weights must share one shape")


@dataclass
class CGATHead:
    W: Tensor
    a: Tensor


@dataclass
class CGATParams:
    heads: list
    dim: int
    leaky_slope: float = DEFAULT_LEAKY_SLOPE
    dropout: float = DEFAULT_ATTN_DROPOUT
    mask_mode: str = "renormalize"

    def __post_init__(self):
        if not self.heads:
            raise ValueError("need at least one attention head")
        if self.leaky_slope <= 0:
            raise ValueError("leaky slope must be positive")


def init_tgat(input_dim, dim=DEFAULT_GAT_DIM, heads=DEFAULT_HEADS, seed=0,
              leaky_slope=DEFAULT_LEAKY_SLOPE, attn_dropout=DEFAULT_ATTN_DROPOUT,
              mask_mode="renormalize"):
    rng = np.random.default_rng(seed)
    head_list = []
    for _ in range(heads):
        ws = {r: weight(rng, input_dim, dim) for r in RELATION_ORDER}
        head_list.append(TGATHead(W_B=ws["B"], W_A=ws["A"], W_S=ws["S"],
                                  W_I=ws["I"], W_M=ws["M"], W_N=ws["N"],
                                  a=weight(rng, 2 * dim, 1)))
    return TGATParams(heads=head_list, dim=dim, leaky_slope=leaky_slope,
                      dropout=attn_dropout, mask_mode=mask_mode)


def init_cgat(input_dim, dim=DEFAULT_GAT_DIM, heads=DEFAULT_HEADS, seed=0,
              leaky_slope=DEFAULT_LEAKY_SLOPE, attn_dropout=DEFAULT_ATTN_DROPOUT,
              mask_mode="renormalize"):
    rng = np.random.default_rng(seed)
    head_list = [CGATHead(W=weight(rng, input_dim, dim),
                          a=weight(rng, 2 * dim, 1))
                 for _ in range(heads)]
    return CGATParams(heads=head_list, dim=dim, leaky_slope=leaky_slope,
                      dropout=attn_dropout, mask_mode=mask_mode)


def _pair_scores(proj_q, proj_k, a):
    """Score matrix s[i][j] = a . [q_i ; k_j] via the rank-1 decomposition."""
    m = proj_q.shape[1]
    src = proj_q @ slice_rows(a, 0, m)
    dst = proj_k @ slice_rows(a, m, 2 * m)
    return src + transpose(dst)


def relation_scores(h, head, relation):
    """Pairwise scores for one relation branch of one head."""
    return _pair_scores(h @ head.W_M, h @ head.relation_weight(relation), head.a)


def relation_attention(scores, adj, leaky_slope=DEFAULT_LEAKY_SLOPE,
                       mask_mode="renormalize"):
    """Attention weights from raw scores and one relation's adjacency.

    Rows whose adjacency is all zero come back all zero; the self-designation
    fallback upstream keeps every token's total attention mass nonzero.
    """
    return masked_softmax(leaky_relu(scores, leaky_slope), adj,
                          axis=-1, mode=mask_mode, empty="zero")


def _apply_dropout(alpha, p, train, keys):
    if not train or p == 0.0:
        return alpha
    if keys is None:
        raise ValueError("training-mode attention dropout needs a key allocator")
    seed, counter = keys.take()
    return dropout(alpha, p, True, seed, counter)


def tgat_layer(h, tm, params, train=False, keys=None):
    """Temporal attention over the six relation matrices; output L x (K*m)."""
    mats = tm.by_relation()
    outputs = []
    for head in params.heads:
        acc = None
        for relation in RELATION_ORDER:
            scores = relation_scores(h, head, relation)
            alpha = relation_attention(scores, mats[relation],
                                       params.leaky_slope, params.mask_mode)
            alpha = _apply_dropout(alpha, params.dropout, train, keys)
            contribution = alpha @ (h @ head.relation_weight(relation))
            acc = contribution if acc is None else acc + contribution
        outputs.append(elu(acc))
    return _concat_heads(outputs)


def cgat_layer(h, adj, params, train=False, keys=None):
    """Single-relation attention over the causal adjacency; output L x (K*m)."""
    outputs = []
    for head in params.heads:
        proj = h @ head.W
        scores = _pair_scores(proj, proj, head.a)
        alpha = relation_attention(scores, adj, params.leaky_slope,
                                   params.mask_mode)
        alpha = _apply_dropout(alpha, params.dropout, train, keys)
        outputs.append(elu(alpha @ proj))
    return _concat_heads(outputs)


def _concat_heads(outputs):
    if len(outputs) == 1:
        return outputs[0]
    return concat(outputs, axis=1)
