"""Dense float64 tensors with reverse-mode differentiation.

Every op returns a new Tensor holding its parents and a closure that pushes the
output gradient back into them. ``backward`` walks the reachable graph in reverse
topological order, so each node's rule runs exactly once.
"""
from __future__ import annotations

import numpy as np

from ..errors import NonScalarLoss, ShapeMismatch

DTYPE = np.float64


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "parents", "backward_fn", "name", "op")
    # make numpy defer to the reflected operators (ndarray * Tensor -> Tensor.__rmul__)
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad = None
        self.requires_grad = requires_grad
        self.parents: tuple[Tensor, ...] = ()
        self.backward_fn = None
        self.name = name
        self.op = "leaf"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        label = self.name or self.op
        return f"Tensor({label}, shape={self.shape})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(as_tensor(other)))

    def __rsub__(self, other):
        return add(as_tensor(other), neg(self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _result(data, parents, backward_fn, op: str) -> Tensor:
    out = Tensor(data)
    out.op = op
    if not np.all(np.isfinite(out.data)):
        raise FloatingPointError(f"{op} produced a non-finite value")
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out.parents = tuple(parents)
        out.backward_fn = backward_fn
    return out


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    if t.grad is None:
        t.grad = np.array(g, dtype=DTYPE, copy=True)
    else:
        t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _check_broadcast(a: Tensor, b: Tensor, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeMismatch(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


# elementwise


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "add")

    def back(g):
        _accumulate(a, _unbroadcast(g, a.shape))
        _accumulate(b, _unbroadcast(g, b.shape))

    return _result(a.data + b.data, (a, b), back, "add")


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "mul")

    def back(g):
        _accumulate(a, _unbroadcast(g * b.data, a.shape))
        _accumulate(b, _unbroadcast(g * a.data, b.shape))

    return _result(a.data * b.data, (a, b), back, "mul")


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _result(-a.data, (a,), lambda g: _accumulate(a, -g), "neg")


def tanh(a) -> Tensor:
    a = as_tensor(a)
    y = np.tanh(a.data)
    return _result(y, (a,), lambda g: _accumulate(a, g * (1.0 - y * y)), "tanh")


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    y = _sigmoid(a.data)
    return _result(y, (a,), lambda g: _accumulate(a, g * y * (1.0 - y)), "sigmoid")


def log(a) -> Tensor:
    a = as_tensor(a)
    if np.any(a.data <= 0):
        raise FloatingPointError("log of a non-positive value")
    return _result(np.log(a.data), (a,), lambda g: _accumulate(a, g / a.data), "log")


def clip(a, lo: float, hi: float) -> Tensor:
    """Clamp values; the gradient is zero where clamping was active."""
    a = as_tensor(a)
    inside = (a.data >= lo) & (a.data <= hi)
    return _result(np.clip(a.data, lo, hi), (a,), lambda g: _accumulate(a, g * inside), "clip")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form: overflow-free for any input
    return 0.5 * (1.0 + np.tanh(0.5 * x))


# linear algebra and reductions


def matmul(a, b) -> Tensor:
    """(..., n) @ (n, m) or (..., n) @ (n,)."""
    a, b = as_tensor(a), as_tensor(b)
    if b.data.ndim not in (1, 2) or a.data.ndim < 1 or a.shape[-1] != b.shape[0]:
        raise ShapeMismatch(f"matmul: shapes {a.shape} and {b.shape} are incompatible")

    def back(g):
        if b.data.ndim == 1:
            _accumulate(a, g[..., None] * b.data)
            _accumulate(b, (a.data * g[..., None]).reshape(-1, b.shape[0]).sum(axis=0))
        else:
            _accumulate(a, g @ b.data.T)
            _accumulate(b, a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, b.shape[1]))

    return _result(a.data @ b.data, (a, b), back, "matmul")


def sum(a, axis=None, keepdims: bool = False) -> Tensor:  # noqa: A001 - mirrors numpy
    a = as_tensor(a)

    def back(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        _accumulate(a, np.broadcast_to(g, a.shape))

    return _result(a.data.sum(axis=axis, keepdims=keepdims), (a,), back, "sum")


def concat(tensors, axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    ndim = tensors[0].data.ndim
    ax = axis % ndim
    for t in tensors[1:]:
        if t.data.ndim != ndim or any(t.shape[d] != tensors[0].shape[d] for d in range(ndim) if d != ax):
            raise ShapeMismatch(f"concat: shapes {tensors[0].shape} and {t.shape} differ off axis {axis}")
    sizes = [t.shape[ax] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def back(g):
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            index = [slice(None)] * ndim
            index[ax] = slice(lo, hi)
            _accumulate(t, g[tuple(index)])

    return _result(np.concatenate([t.data for t in tensors], axis=ax), tensors, back, "concat")


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    return _result(a.data.reshape(shape), (a,), lambda g: _accumulate(a, g.reshape(a.shape)), "reshape")


def getitem(a, index) -> Tensor:
    a = as_tensor(a)

    basic = all(isinstance(k, (int, slice)) or k is Ellipsis
                for k in (index if isinstance(index, tuple) else (index,)))

    def back(g):
        full = np.zeros_like(a.data)
        if basic:
            full[index] = g
        else:
            np.add.at(full, index, g)
        _accumulate(a, full)

    return _result(a.data[index], (a,), back, "getitem")


def take(table, indices) -> Tensor:
    """Row gather: out[...] = table[indices[...]] (embedding lookup)."""
    table = as_tensor(table)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= table.shape[0]):
        raise ShapeMismatch(f"take: index out of range for table of shape {table.shape}")

    def back(g):
        if table.requires_grad:
            _accumulate(table, _scatter_rows(table.shape, indices.ravel(), g.reshape(-1, *table.shape[1:])))

    return _result(table.data[indices], (table,), back, "take")


def _scatter_rows(shape, idx: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Sum ``rows`` into a zero table at ``idx`` (repeated indices accumulate)."""
    full = np.zeros(shape, dtype=DTYPE)
    if idx.size == 0:
        return full
    order = np.argsort(idx, kind="stable")
    sorted_idx = idx[order]
    starts = np.flatnonzero(np.r_[True, sorted_idx[1:] != sorted_idx[:-1]])
    full[sorted_idx[starts]] = np.add.reduceat(rows[order], starts, axis=0)
    return full


def softmax(a, axis: int = -1, mask=None) -> Tensor:
    """Softmax along ``axis``; entries where ``mask`` is 0 get probability 0."""
    a = as_tensor(a)
    x = a.data
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != x.shape:
            raise ShapeMismatch(f"softmax: mask shape {mask.shape} != input shape {x.shape}")
        x = np.where(mask, x, -np.inf)
    shift = np.max(x, axis=axis, keepdims=True)
    e = np.exp(x - shift)
    p = e / e.sum(axis=axis, keepdims=True)

    def back(g):
        _accumulate(a, p * (g - (g * p).sum(axis=axis, keepdims=True)))

    return _result(p, (a,), back, "softmax")


# graph traversal


def topological_order(root: Tensor) -> list[Tensor]:
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def backward(loss: Tensor, params: dict[str, Tensor] | None = None) -> dict[str, np.ndarray]:
    """Populate ``.grad`` on every reachable tensor; return gradients for ``params``.

    Parameters not reachable from the loss get an all-zero gradient.
    """
    if loss.data.size != 1:
        raise NonScalarLoss(f"loss must be a scalar, got shape {loss.shape}")
    order = topological_order(loss)
    if params:
        for p in params.values():
            p.grad = None
    for node in order:
        node.grad = None
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node.backward_fn is not None and node.grad is not None:
            node.backward_fn(node.grad)
    if params is None:
        return {}
    return {name: (p.grad if p.grad is not None else np.zeros_like(p.data)) for name, p in params.items()}
