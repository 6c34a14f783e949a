"""Dense tensors with reverse-mode automatic differentiation.

Everything the model computes flows through the :class:`Tensor` type defined
here: a shape, a row-major float buffer (float32 by default), and an optional
record of how the value was produced so gradients can be pushed back through
it.  The operation set is deliberately small: exactly the primitives the
attention layers, the recurrent encoder and the classifier head need, plus
``grad_check`` as an independent finite-difference oracle.

Backward graphs are plain Python closures over the forward operands.  A graph
is acyclic by construction; ``Tensor.backward`` walks it once in reverse
topological order and accumulates into ``.grad``.  Tensors are immutable after
forward construction except for that gradient accumulation, so distinct graphs
may be evaluated on distinct threads; a single backward pass has one owner.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tensor",
    "TensorError",
    "ShapeError",
    "MaskError",
    "NonFiniteError",
    "as_tensor",
    "parameter",
    "matmul",
    "add",
    "sub",
    "mul",
    "concat",
    "transpose",
    "reshape",
    "leaky_relu",
    "sigmoid",
    "tanh",
    "elu",
    "softmax",
    "masked_softmax",
    "dropout",
    "cross_entropy",
    "reduce_sum",
    "reduce_mean",
    "embedding_lookup",
    "slice_rows",
    "slice_cols",
    "grad_check",
]

DEFAULT_DTYPE = np.float32

# Output-finiteness checks run on every op.  The fast path is a single sum,
# which cannot miss a NaN/inf entry; a positive hit is re-verified elementwise
# so that a legitimate overflow of the *sum* alone never raises.
FINITE_CHECKS = True


class TensorError(Exception):
    """Base class for tensor-core failures."""


class ShapeError(TensorError):
    """Operands do not have compatible shapes."""


class MaskError(TensorError):
    """A masked softmax slice has no unmasked entries in renormalizing mode."""


class NonFiniteError(TensorError):
    """An operation produced NaN or infinity; the message names the op."""


def _check_finite(name, data):
    if not FINITE_CHECKS:
        return
    total = np.sum(data)
    if not np.isfinite(total) and not np.all(np.isfinite(data)):
        raise NonFiniteError(f"non-finite values produced by {name}")


class Tensor:
    """A dense n-dimensional array participating in a backward graph.

    Attributes:
        data: the forward value, a numpy array (float32 unless the caller
            supplies another floating dtype, e.g. inside ``grad_check``).
        grad: same-shape gradient buffer, allocated lazily during backward.
        requires_grad: whether gradients should flow to this tensor.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        arr = np.asarray(data)
        if arr.dtype.kind != "f":
            arr = arr.astype(DEFAULT_DTYPE)
        self.data = arr
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data)

    def detach(self):
        """A constant tensor sharing this value, cut out of the graph."""
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self):
        """Accumulate d(self)/d(leaf) into every reachable ``grad``.

        Only defined for scalar outputs.  Uses an explicit stack so graph
        depth (e.g. long recurrences) is not limited by Python recursion.
        """
        if self.size != 1:
            raise ShapeError("backward() requires a scalar tensor")
        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in visited:
                    stack.append((p, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x):
    """Wrap arrays and scalars as constant tensors; pass tensors through."""
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def parameter(data):
    """A tensor that collects gradients (model parameter)."""
    return Tensor(data, requires_grad=True)


def _result(data, name, parents, backward):
    _check_finite(name, data)
    needs = any(p.requires_grad for p in parents)
    if not needs:
        return Tensor(data)
    return Tensor(data, requires_grad=True, _parents=parents, _backward=backward)


def _unbroadcast(g, shape):
    """Sum a broadcast gradient back down to the operand's shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-D operands, got {a.shape} @ {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
    out = a.data @ b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(g @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ g)

    return _result(out, "matmul", (a, b), backward)


def _broadcastable(x, y):
    try:
        np.broadcast_shapes(x, y)
        return True
    except ValueError:
        return False


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if not _broadcastable(a.shape, b.shape):
        raise ShapeError(f"add shape mismatch: {a.shape} + {b.shape}")
    out = a.data + b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.shape))

    return _result(out, "add", (a, b), backward)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if not _broadcastable(a.shape, b.shape):
        raise ShapeError(f"sub shape mismatch: {a.shape} - {b.shape}")
    out = a.data - b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-g, b.shape))

    return _result(out, "sub", (a, b), backward)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if not _broadcastable(a.shape, b.shape):
        raise ShapeError(f"mul shape mismatch: {a.shape} * {b.shape}")
    out = a.data * b.data

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.shape))

    return _result(out, "mul", (a, b), backward)


def concat(tensors, axis):
    ts = [as_tensor(t) for t in tensors]
    if not ts:
        raise ShapeError("concat of zero tensors")
    out = np.concatenate([t.data for t in ts], axis=axis)
    sizes = [t.shape[axis] for t in ts]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(ts, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t._accumulate(g[tuple(idx)])

    return _result(out, "concat", tuple(ts), backward)


def transpose(a):
    a = as_tensor(a)
    if a.ndim != 2:
        raise ShapeError(f"transpose expects a 2-D tensor, got {a.shape}")
    out = a.data.T.copy()

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.T)

    return _result(out, "transpose", (a,), backward)


def reshape(a, shape):
    a = as_tensor(a)
    out = a.data.reshape(shape)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g.reshape(a.shape))

    return _result(out, "reshape", (a,), backward)


def leaky_relu(a, slope=0.008):
    a = as_tensor(a)
    out = np.where(a.data > 0, a.data, a.data * np.asarray(slope, dtype=a.data.dtype))

    def backward(g):
        if a.requires_grad:
            a._accumulate(np.where(a.data > 0, g, g * np.asarray(slope, dtype=g.dtype)))

    return _result(out, "leaky_relu", (a,), backward)


def sigmoid(a):
    a = as_tensor(a)
    # split by sign so exp never overflows
    pos = a.data >= 0
    z = np.exp(np.where(pos, -a.data, a.data))
    out = np.where(pos, 1.0 / (1.0 + z), z / (1.0 + z)).astype(a.data.dtype)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * out * (1.0 - out))

    return _result(out, "sigmoid", (a,), backward)


def tanh(a):
    a = as_tensor(a)
    out = np.tanh(a.data)

    def backward(g):
        if a.requires_grad:
            a._accumulate(g * (1.0 - out * out))

    return _result(out, "tanh", (a,), backward)


def elu(a, alpha=1.0):
    a = as_tensor(a)
    alpha = np.asarray(alpha, dtype=a.data.dtype)
    out = np.where(a.data > 0, a.data, alpha * np.expm1(a.data))

    def backward(g):
        if a.requires_grad:
            a._accumulate(np.where(a.data > 0, g, g * (out + alpha)))

    return _result(out, "elu", (a,), backward)


def reduce_sum(a, axis=None, keepdims=False):
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if a.requires_grad:
            if axis is None:
                a._accumulate(np.broadcast_to(g, a.shape).copy())
            else:
                gg = g if keepdims else np.expand_dims(g, axis)
                a._accumulate(np.broadcast_to(gg, a.shape).copy())

    return _result(out, "reduce_sum", (a,), backward)


def reduce_mean(a):
    a = as_tensor(a)
    out = a.data.mean()

    def backward(g):
        if a.requires_grad:
            a._accumulate(np.full(a.shape, g / a.size, dtype=a.data.dtype))

    return _result(out, "reduce_mean", (a,), backward)


def slice_rows(a, start, stop):
    a = as_tensor(a)
    out = a.data[start:stop].copy()

    def backward(g):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[start:stop] += g

    return _result(out, "slice_rows", (a,), backward)


def slice_cols(a, start, stop):
    a = as_tensor(a)
    if a.ndim != 2:
        raise ShapeError(f"slice_cols expects a 2-D tensor, got {a.shape}")
    out = a.data[:, start:stop].copy()

    def backward(g):
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[:, start:stop] += g

    return _result(out, "slice_cols", (a,), backward)


def embedding_lookup(table, ids):
    """Gather rows ``table[ids]``; backward scatter-adds into the table."""
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)
    if table.ndim != 2 or ids.ndim != 1:
        raise ShapeError("embedding_lookup expects a 2-D table and 1-D ids")
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeError("embedding id out of range")
    out = table.data[ids].copy()

    def backward(g):
        if table.requires_grad:
            if table.grad is None:
                table.grad = np.zeros_like(table.data)
            np.add.at(table.grad, ids, g)

    return _result(out, "embedding_lookup", (table,), backward)


def _validate_mask(mask, shape):
    m = np.asarray(mask)
    if m.shape != shape:
        raise ShapeError(f"mask shape {m.shape} does not match scores shape {shape}")
    if m.size and not np.isin(m, (0, 1)).all():
        raise ValueError("mask entries must be 0 or 1")
    return m


def masked_softmax(scores, mask, axis=-1, mode="renormalize", empty="error"):
    """Softmax restricted by a binary mask.

    * ``mode="renormalize"``: softmax over the unmasked entries of each slice;
      masked positions are exactly 0 and unmasked ones sum to 1.  A slice with
      no unmasked entry raises :class:`MaskError` under ``empty="error"`` and
      yields an all-zero slice under ``empty="zero"``.
    * ``mode="literal"``: full softmax over the slice, then an elementwise
      product with the mask, so slices need not sum to 1.
    """
    s = as_tensor(scores)
    m = _validate_mask(mask, s.shape)
    if mode not in ("renormalize", "literal"):
        raise ValueError(f"unknown masked_softmax mode: {mode!r}")
    mf = (m > 0)

    if mode == "literal":
        mx = s.data.max(axis=axis, keepdims=True)
        ex = np.exp(s.data - mx)
        full = ex / ex.sum(axis=axis, keepdims=True)
        out = np.where(mf, full, 0.0).astype(s.data.dtype)

        def backward(g):
            if s.requires_grad:
                gm = np.where(mf, g, 0.0)
                inner = (gm * full).sum(axis=axis, keepdims=True)
                s._accumulate((full * (gm - inner)).astype(s.data.dtype))

        return _result(out, "masked_softmax", (s,), backward)

    masked = np.where(mf, s.data, -np.inf)
    mx = masked.max(axis=axis, keepdims=True)
    have_any = np.isfinite(mx)
    if not have_any.all():
        if empty == "error":
            raise MaskError("all-masked slice in renormalizing masked_softmax")
        mx = np.where(have_any, mx, 0.0)
    ex = np.where(mf, np.exp(masked - mx), 0.0)
    denom = ex.sum(axis=axis, keepdims=True)
    out = (ex / np.where(denom > 0, denom, 1.0)).astype(s.data.dtype)

    def backward(g):
        if s.requires_grad:
            inner = (g * out).sum(axis=axis, keepdims=True)
            s._accumulate((out * (g - inner)).astype(s.data.dtype))

    return _result(out, "masked_softmax", (s,), backward)


def softmax(a, axis=-1):
    a = as_tensor(a)
    return masked_softmax(a, np.ones(a.shape, dtype=np.uint8), axis=axis)


def dropout(a, p, train_mode, seed, counter=0):
    """Inverted dropout driven by a counter-based (Philox) generator.

    The (seed, counter) pair fully determines the mask, independent of call
    order or platform, so training runs are bit-reproducible.
    """
    a = as_tensor(a)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if not train_mode or p == 0.0:
        return a
    gen = np.random.Generator(np.random.Philox(key=int(seed), counter=int(counter)))
    keep = gen.random(a.shape) >= p
    scale = np.asarray(1.0 / (1.0 - p), dtype=a.data.dtype)
    mask = keep.astype(a.data.dtype) * scale
    return mul(a, Tensor(mask))


def cross_entropy(probs, one_hot, floor=None):
    """Mean over rows of ``-log(probs[gold])`` with ``gold`` given one-hot.

    ``probs`` must be strictly positive wherever ``one_hot`` is 1 unless a
    ``floor`` is supplied, in which case gold probabilities below it are
    clamped (contributing ``-log(floor)`` with zero gradient).
    """
    p = as_tensor(probs)
    oh = np.asarray(one_hot)
    if oh.shape != p.shape:
        raise ShapeError(f"one_hot shape {oh.shape} does not match probs {p.shape}")
    if p.ndim == 1:
        p2 = p.data[None, :]
        oh2 = oh[None, :]
    elif p.ndim == 2:
        p2 = p.data
        oh2 = oh
    else:
        raise ShapeError("cross_entropy expects a 1-D or 2-D probability tensor")
    if not np.isin(oh2, (0, 1)).all() or not (oh2.sum(axis=1) == 1).all():
        raise ValueError("one_hot must contain exactly one 1 per row")
    rows = p2.shape[0]
    picked = (p2 * oh2).sum(axis=1)
    if floor is None:
        if (picked <= 0).any():
            raise ValueError("cross_entropy: zero probability at gold class")
        live = picked
    else:
        live = np.maximum(picked, floor)
    out = np.asarray(-np.log(live).mean(), dtype=p.data.dtype)

    def backward(g):
        if p.requires_grad:
            coef = np.where(picked >= live, -1.0 / live, 0.0) / rows
            gp = (oh2 * coef[:, None] * g).astype(p.data.dtype)
            p._accumulate(gp.reshape(p.shape))

    return _result(out, "cross_entropy", (p,), backward)


def grad_check(f, inputs, eps=1e-5):
    """Max relative error between reverse-mode and central-difference grads.

    ``f`` must be a deterministic scalar-valued function of its tensor inputs
    (dropout disabled).  Both the analytic pass and the two-sided evaluations
    ``(f(x+eps) - f(x-eps)) / (2 eps)`` run on float64 copies of the inputs so
    the comparison itself does not drown in float32 rounding; the relative
    error per coordinate is ``|a - n| / max(1, |a|, |n|)``.
    """
    work = [Tensor(np.asarray(t.data, dtype=np.float64).copy(), requires_grad=True)
            for t in inputs]
    out = f(*work)
    if out.size != 1:
        raise ShapeError("grad_check requires a scalar-valued function")
    out.backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy()
                for t in work]

    def value():
        return float(f(*work).data)

    worst = 0.0
    for t, ana in zip(work, analytic):
        flat = t.data.reshape(-1)
        aflat = ana.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = value()
            flat[i] = orig - eps
            lo = value()
            flat[i] = orig
            num = (hi - lo) / (2.0 * eps)
            if not np.isfinite(num):
                raise NonFiniteError("non-finite finite-difference quotient")
            rel = abs(aflat[i] - num) / max(1.0, abs(aflat[i]), abs(num))
            worst = max(worst, rel)
    return worst
