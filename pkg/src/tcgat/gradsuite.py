"""Central finite-difference checks for every primitive and composed layer.

Each entry builds a small deterministic scalar function and compares its
reverse-mode gradient against central differences.  Inputs to kinked
activations are kept away from the kink so the finite-difference quotient
is valid.  The whole suite is sized to finish in seconds.
"""

from __future__ import annotations

import numpy as np

from .autodiff import (Tensor, concat, cross_entropy, dropout, elu,
                       embedding_lookup, grad_check, leaky_relu,
                       masked_softmax, matmul, reduce_mean, reduce_sum,
                       reshape, sigmoid, slice_cols, slice_rows, softmax,
                       tanh, transpose)
from .attention import TGATHead, TGATParams, CGATHead, CGATParams, \
    cgat_layer, tgat_layer
from .corpus import validate_record
from .encoder import BiLSTMParams, LSTMDirection, bilstm_forward, init_bilstm
from .fusion import (ClassifierParams, EquilibriumParams, WarningCounter,
                     classify, equilibrium_fuse, project_branches, token_loss)
from .graphs import build_time_matrices

TOLERANCE = 1e-4


def _rng():
    return np.random.default_rng(20240)


def _t(rng, *shape, low=0.2, high=1.0):
    """Random tensor with magnitudes bounded away from activation kinks."""
    mag = rng.uniform(low, high, size=shape)
    sign = rng.choice([-1.0, 1.0], size=shape)
    return Tensor((mag * sign).astype(np.float32), requires_grad=True)


def _weighted(x, coeff):
    return reduce_sum(x * Tensor(coeff.astype(np.float32)))


def _primitive_checks(rng):
    checks = {}
    c34 = rng.standard_normal((3, 4))
    c43 = rng.standard_normal((4, 3))
    c33 = rng.standard_normal((3, 3))
    c12 = rng.standard_normal((12,))
    c64 = rng.standard_normal((6, 4))
    c32 = rng.standard_normal((3, 2))
    c24 = rng.standard_normal((2, 4))
    c14 = rng.standard_normal((1, 4))
    c43_lookup = rng.standard_normal((4, 3))

    checks["add"] = grad_check(
        lambda a, b: _weighted(a + b, c34), [_t(rng, 3, 4), _t(rng, 1, 4)])
    checks["sub"] = grad_check(
        lambda a, b: _weighted(a - b, c34), [_t(rng, 3, 4), _t(rng, 3, 4)])
    checks["mul"] = grad_check(
        lambda a, b: _weighted(a * b, c34), [_t(rng, 3, 4), _t(rng, 1, 4)])
    checks["matmul"] = grad_check(
        lambda a, b: _weighted(matmul(a, b), c33), [_t(rng, 3, 4), _t(rng, 4, 3)])
    checks["transpose"] = grad_check(
        lambda a: _weighted(transpose(a), c43), [_t(rng, 3, 4)])
    checks["reshape"] = grad_check(
        lambda a: _weighted(reshape(a, (12,)), c12), [_t(rng, 3, 4)])
    checks["concat_rows"] = grad_check(
        lambda a, b: _weighted(concat([a, b], axis=0), c64),
        [_t(rng, 3, 4), _t(rng, 3, 4)])
    checks["concat_cols"] = grad_check(
        lambda a, b: _weighted(concat([a, b], axis=1), c34),
        [_t(rng, 3, 2), _t(rng, 3, 2)])
    checks["slice_rows"] = grad_check(
        lambda a: _weighted(slice_rows(a, 1, 3), c24),
        [_t(rng, 4, 4)])
    checks["slice_cols"] = grad_check(
        lambda a: _weighted(slice_cols(a, 0, 2), c32), [_t(rng, 3, 4)])
    checks["leaky_relu"] = grad_check(
        lambda a: _weighted(leaky_relu(a, 0.008), c34), [_t(rng, 3, 4)])
    checks["sigmoid"] = grad_check(
        lambda a: _weighted(sigmoid(a), c34), [_t(rng, 3, 4)])
    checks["tanh"] = grad_check(
        lambda a: _weighted(tanh(a), c34), [_t(rng, 3, 4)])
    checks["elu"] = grad_check(
        lambda a: _weighted(elu(a), c34), [_t(rng, 3, 4)])
    checks["reduce_sum_all"] = grad_check(
        lambda a: reduce_sum(a), [_t(rng, 3, 4)])
    checks["reduce_sum_axis"] = grad_check(
        lambda a: _weighted(reduce_sum(a, axis=0, keepdims=True), c14),
        [_t(rng, 3, 4)])
    checks["reduce_mean"] = grad_check(
        lambda a: reduce_mean(a), [_t(rng, 3, 4)])

    ids = np.array([0, 2, 1, 2], dtype=np.int64)
    checks["embedding_lookup"] = grad_check(
        lambda table: _weighted(embedding_lookup(table, ids), c43_lookup),
        [_t(rng, 3, 3)])

    mask = np.array([[1, 0, 1, 1], [1, 1, 0, 0], [0, 1, 1, 0]])
    checks["softmax"] = grad_check(
        lambda a: _weighted(softmax(a, axis=-1), c34), [_t(rng, 3, 4)])
    checks["masked_softmax_renormalize"] = grad_check(
        lambda a: _weighted(masked_softmax(a, mask, mode="renormalize"), c34),
        [_t(rng, 3, 4)])
    checks["masked_softmax_literal"] = grad_check(
        lambda a: _weighted(masked_softmax(a, mask, mode="literal"), c34),
        [_t(rng, 3, 4)])
    empty_row = np.array([[1, 1, 0, 0], [0, 0, 0, 0], [1, 0, 1, 0]])
    checks["masked_softmax_empty_zero"] = grad_check(
        lambda a: _weighted(
            masked_softmax(a, empty_row, mode="renormalize", empty="zero"), c34),
        [_t(rng, 3, 4)])

    checks["dropout"] = grad_check(
        lambda a: _weighted(dropout(a, 0.3, True, seed=7, counter=11), c34),
        [_t(rng, 3, 4)])

    one_hot = np.eye(4, dtype=np.float32)[[0, 3, 1]]
    checks["cross_entropy"] = grad_check(
        lambda p: cross_entropy(p, one_hot),
        [Tensor(rng.uniform(0.1, 0.9, size=(3, 4)).astype(np.float32),
                requires_grad=True)])
    checks["softmax_cross_entropy"] = grad_check(
        lambda a: cross_entropy(softmax(a, axis=-1), one_hot, floor=1e-12),
        [_t(rng, 3, 4)])
    return checks


def _bilstm_check(rng):
    base = init_bilstm(4, 3, seed=5)
    coeff = rng.standard_normal((3, 6))

    def f(x, *tensors):
        fwd = LSTMDirection(*tensors[:12])
        bwd = LSTMDirection(*tensors[12:])
        params = BiLSTMParams(fwd=fwd, bwd=bwd, input_dim=4, hidden=3)
        return _weighted(bilstm_forward(x, params), coeff)

    direction_fields = ("W_i", "U_i", "b_i", "W_f", "U_f", "b_f",
                        "W_o", "U_o", "b_o", "W_c", "U_c", "b_c")
    inputs = [_t(rng, 3, 4)]
    inputs += [getattr(base.fwd, name) for name in direction_fields]
    inputs += [getattr(base.bwd, name) for name in direction_fields]
    return grad_check(f, inputs)


def _fixture_sentence():
    return validate_record({
        "id": "grad-0",
        "tokens": ["storm", "wrecked", "pier"],
        "causal_tags": ["C", "O", "E"],
        "temporal": [[0, 2, "B"]],
    })


def _tgat_check(rng, mask_mode):
    tm = build_time_matrices(_fixture_sentence())
    coeff = rng.standard_normal((3, 4))

    def f(h, *tensors):
        heads = [TGATHead(*tensors[:7]), TGATHead(*tensors[7:])]
        params = TGATParams(heads=heads, dim=2, leaky_slope=0.008,
                            dropout=0.0, mask_mode=mask_mode)
        return _weighted(tgat_layer(h, tm, params), coeff)

    inputs = [_t(rng, 3, 3)]
    for _ in range(2):
        inputs += [_t(rng, 3, 2) for _ in range(6)]
        inputs.append(_t(rng, 4, 1))
    return grad_check(f, inputs)


def _cgat_check(rng):
    adj = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=np.float32)
    coeff = rng.standard_normal((3, 4))

    def f(h, W1, a1, W2, a2):
        params = CGATParams(heads=[CGATHead(W=W1, a=a1), CGATHead(W=W2, a=a2)],
                            dim=2, leaky_slope=0.008, dropout=0.0)
        return _weighted(cgat_layer(h, adj, params), coeff)

    inputs = [_t(rng, 3, 3), _t(rng, 3, 2), _t(rng, 4, 1),
              _t(rng, 3, 2), _t(rng, 4, 1)]
    return grad_check(f, inputs)


def _fusion_check(rng):
    tags = ["C", "O", "E"]
    counter = WarningCounter()

    def f(tc, ctx, P_tc, P_ctx, W, b, W_out, b_out):
        eq = EquilibriumParams(P_tc=P_tc, P_ctx=P_ctx, W=W, b=b)
        cls = ClassifierParams(W_out=W_out, b_out=b_out)
        h_tc, h_ctx = project_branches(tc, ctx, eq)
        fused = equilibrium_fuse(h_tc, h_ctx, eq)
        probs = classify(fused, cls)
        return token_loss(probs, tags, warnings=counter)

    inputs = [_t(rng, 3, 6), _t(rng, 3, 5), _t(rng, 6, 4), _t(rng, 5, 4),
              _t(rng, 4, 4), _t(rng, 1, 4), _t(rng, 4, 3), _t(rng, 1, 3)]
    return grad_check(f, inputs)


def run_gradient_suite():
    """All checks as {name: max relative error}."""
    rng = _rng()
    checks = _primitive_checks(rng)
    checks["bilstm_3step"] = _bilstm_check(rng)
    checks["tgat_layer_renormalize"] = _tgat_check(rng, "renormalize")
    checks["tgat_layer_literal"] = _tgat_check(rng, "literal")
    checks["cgat_layer"] = _cgat_check(rng)
    checks["fuse_classify_loss"] = _fusion_check(rng)
    return checks
