"""Equilibrium gating of the two feature branches and token classification.

The temporal-causal branch (T-GAT and C-GAT concatenated) and the contextual
branch are each projected to a common width d.  A learned sigmoid gate then
mixes them per coordinate, so every fused value lies between its two branch
values.  A linear softmax head maps the fused features to per-token
probabilities over the O/C/E tags, scored by mean cross-entropy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, ShapeError, cross_entropy, sigmoid, softmax
from .corpus import CAUSAL_TAGS
from .params import bias, weight

DEFAULT_FUSE_DIM = 300
PROB_FLOOR = 1e-12

logger = logging.getLogger(__name__)


class WarningCounter:
    """Counts gold probabilities clamped at the loss floor."""

    def __init__(self):
        self.count = 0

    def add(self, n):
        self.count += n


clamp_warnings = WarningCounter()


@dataclass
class EquilibriumParams:
    P_tc: Tensor
    P_ctx: Tensor
    W: Tensor
    b: Tensor


@dataclass
class ClassifierParams:
    W_out: Tensor
    b_out: Tensor


def init_equilibrium(tc_dim, ctx_dim, d=DEFAULT_FUSE_DIM, seed=0):
    rng = np.random.default_rng(seed)
    return EquilibriumParams(P_tc=weight(rng, tc_dim, d),
                             P_ctx=weight(rng, ctx_dim, d),
                             W=weight(rng, d, d),
                             b=bias(d))


def init_classifier(d=DEFAULT_FUSE_DIM, n_classes=len(CAUSAL_TAGS), seed=0):
    rng = np.random.default_rng(seed)
    return ClassifierParams(W_out=weight(rng, d, n_classes), b_out=bias(n_classes))


def project_branches(tc_features, ctx_features, params):
    """Map both branches to the shared gate width."""
    return tc_features @ params.P_tc, ctx_features @ params.P_ctx


def equilibrium_gate(h_tc, h_ctx, params):
    if h_tc.shape != h_ctx.shape:
        raise ShapeError(f"branch shapes differ: {h_tc.shape} vs {h_ctx.shape}")
    return sigmoid((h_tc + h_ctx) @ params.W + params.b)


def equilibrium_fuse(h_tc, h_ctx, params):
    """Gate in (0,1) per coordinate; output = g*h_tc + (1-g)*h_ctx."""
    g = equilibrium_gate(h_tc, h_ctx, params)
    one = Tensor(np.float32(1.0))
    return g * h_tc + (one - g) * h_ctx


def classify(h, params):
    """Per-token softmax distribution over the causal tags."""
    if h.shape[1] != params.W_out.shape[0]:
        raise ShapeError(
            f"classifier expects width {params.W_out.shape[0]}, got {h.shape[1]}")
    return softmax(h @ params.W_out + params.b_out, axis=-1)


def tags_to_one_hot(tags):
    index = {tag: k for k, tag in enumerate(CAUSAL_TAGS)}
    out = np.zeros((len(tags), len(CAUSAL_TAGS)), dtype=np.float32)
    for row, tag in enumerate(tags):
        out[row, index[tag]] = 1.0
    return out


def token_loss(probs, tags, floor=PROB_FLOOR, warnings=clamp_warnings):
    """Mean over tokens of -log P(gold tag).

    Gold probabilities below ``floor`` are clamped there (zero gradient) and
    counted on ``warnings`` so degenerate runs are visible, not fatal.
    """
    one_hot = tags_to_one_hot(tags)
    if one_hot.shape != probs.shape:
        raise ShapeError(f"{len(tags)} tags vs probs shape {probs.shape}")
    picked = (probs.data * one_hot).sum(axis=1)
    clamped = int((picked < floor).sum())
    if clamped:
        warnings.add(clamped)
        logger.warning("clamped %d gold probabilities below %g", clamped, floor)
    return cross_entropy(probs, one_hot, floor=floor)
