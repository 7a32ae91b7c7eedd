"""Dense float64 tensors with tape-based reverse-mode differentiation.

Every operation that touches a tensor with ``requires_grad`` appends a node to
the tape. Node ids are issued from a monotone counter, so sorting the nodes
reachable from a loss by id reproduces insertion order; ``backward`` walks that
order in reverse and visits each node exactly once.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Sequence

import numpy as np

_node_ids = itertools.count()


class AutogradError(RuntimeError):
    """Raised on misuse of the differentiation machinery."""


class Node:
    """One tape entry: the op that produced a tensor and how to differentiate it."""

    __slots__ = ("id", "op", "parents", "backward")

    def __init__(self, op: str, parents: Sequence["Tensor"], backward: Callable):
        self.id = next(_node_ids)
        self.op = op
        self.parents = tuple(parents)
        self.backward = backward

    def __repr__(self) -> str:
        return f"Node(id={self.id}, op={self.op!r})"


def _as_array(value) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    return arr


class Tensor:
    """A dense array of float64 values with an optional gradient tape node."""

    __array_priority__ = 100

    def __init__(self, data, requires_grad: bool = False, _node: Node | None = None):
        self.data = _as_array(data)
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._node = _node

    # -- construction helpers -------------------------------------------------
    @classmethod
    def _from_op(cls, data: np.ndarray, op: str, parents: Sequence["Tensor"], backward: Callable) -> "Tensor":
        needs = any(p.requires_grad for p in parents)
        if not needs:
            return cls(data)
        return cls(data, requires_grad=True, _node=Node(op, parents, backward))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return self._node is None

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.item())

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def requires_grad_(self, flag: bool = True) -> "Tensor":
        if not self.is_leaf:
            raise AutogradError("requires_grad_ is only valid on leaf tensors")
        self.requires_grad = flag
        return self

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"

    def __len__(self) -> int:
        return len(self.data)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(ensure_tensor(other), self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise TypeError("division by a tensor is not supported; use mul with a reciprocal")
        return scale(self, 1.0 / float(other))

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return slice_(self, index)

    def sum(self, axis=None, keepdims: bool = False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes or None)

    def backward(self, grad=None) -> None:
        backward(self, grad)


def ensure_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# -- reverse pass ---------------------------------------------------------------
def _tape_for(root: Tensor) -> list[Tensor]:
    """Tensors reachable from ``root`` that carry a node, newest first."""
    seen: set[int] = set()
    stack = [root]
    produced: list[Tensor] = []
    while stack:
        t = stack.pop()
        if id(t) in seen:
            continue
        seen.add(id(t))
        if t._node is None:
            continue
        produced.append(t)
        stack.extend(p for p in t._node.parents if p.requires_grad)
    produced.sort(key=lambda t: t._node.id, reverse=True)
    return produced


def _propagate(root: Tensor, seed: np.ndarray) -> dict[int, tuple[Tensor, np.ndarray]]:
    grads: dict[int, tuple[Tensor, np.ndarray]] = {id(root): (root, seed)}
    for t in _tape_for(root):
        entry = grads.get(id(t))
        if entry is None:
            continue
        upstream = entry[1]
        parent_grads = t._node.backward(upstream)
        for parent, pg in zip(t._node.parents, parent_grads):
            if pg is None or not parent.requires_grad:
                continue
            pg = np.asarray(pg, dtype=np.float64)
            if pg.shape != parent.shape:
                raise AutogradError(
                    f"{t._node.op}: gradient shape {pg.shape} does not match input {parent.shape}"
                )
            key = id(parent)
            if key in grads:
                grads[key] = (parent, grads[key][1] + pg)
            else:
                grads[key] = (parent, pg)
    return grads


def _seed(root: Tensor, grad) -> np.ndarray:
    if not root.requires_grad:
        raise AutogradError("backward called on a tensor that is not on the tape")
    if grad is None:
        if root.size != 1:
            raise AutogradError("backward without an explicit gradient needs a scalar output")
        return np.ones_like(root.data)
    seed = _as_array(grad)
    if seed.shape != root.shape:
        raise AutogradError(f"seed gradient shape {seed.shape} != output shape {root.shape}")
    return seed


def backward(root: Tensor, grad=None) -> None:
    """Accumulate d(root)/d(leaf) into ``leaf.grad`` for every reachable leaf."""
    grads = _propagate(root, _seed(root, grad))
    for tensor, g in grads.values():
        if tensor.is_leaf:
            tensor.grad = g.copy() if tensor.grad is None else tensor.grad + g


def grad(root: Tensor, inputs: Iterable[Tensor], seed=None) -> list[np.ndarray]:
    """Return d(root)/d(input) for each input without touching any ``.grad``."""
    grads = _propagate(root, _seed(root, seed))
    out = []
    for t in inputs:
        entry = grads.get(id(t))
        out.append(entry[1] if entry is not None else np.zeros_like(t.data))
    return out


# -- primitive ops ----------------------------------------------------------------
def add(a, b) -> Tensor:
    a, b = ensure_tensor(a), ensure_tensor(b)

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor._from_op(a.data + b.data, "add", (a, b), bw)


def sub(a, b) -> Tensor:
    a, b = ensure_tensor(a), ensure_tensor(b)

    def bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor._from_op(a.data - b.data, "sub", (a, b), bw)


def mul(a, b) -> Tensor:
    a, b = ensure_tensor(a), ensure_tensor(b)

    def bw(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor._from_op(a.data * b.data, "mul", (a, b), bw)


def scale(a: Tensor, factor: float) -> Tensor:
    factor = float(factor)
    return Tensor._from_op(a.data * factor, "scale", (a,), lambda g: (g * factor,))


def matmul(a, b) -> Tensor:
    """Matrix product with numpy broadcasting over leading axes."""
    a, b = ensure_tensor(a), ensure_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ValueError("matmul expects operands with at least two axes")

    def bw(g):
        ga = g @ np.swapaxes(b.data, -1, -2)
        gb = np.swapaxes(a.data, -1, -2) @ g
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return Tensor._from_op(a.data @ b.data, "matmul", (a, b), bw)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return Tensor._from_op(np.where(mask, a.data, 0.0), "relu", (a,), lambda g: (g * mask,))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Tensor) -> Tensor:
    s = _sigmoid(a.data)
    return Tensor._from_op(s, "sigmoid", (a,), lambda g: (g * s * (1.0 - s),))


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    return Tensor._from_op(t, "tanh", (a,), lambda g: (g * (1.0 - t * t),))


def exp(a: Tensor) -> Tensor:
    e = np.exp(a.data)
    return Tensor._from_op(e, "exp", (a,), lambda g: (g * e,))


def log(a: Tensor) -> Tensor:
    return Tensor._from_op(np.log(a.data), "log", (a,), lambda g: (g / a.data,))


def _softmax(x: np.ndarray, axis: int) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    s = _softmax(a.data, axis)

    def bw(g):
        return (s * (g - (g * s).sum(axis=axis, keepdims=True)),)

    return Tensor._from_op(s, "softmax", (a,), bw)


def log_softmax(a: Tensor, axis: int = -1) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - lse
    s = np.exp(out)

    def bw(g):
        return (g - s * g.sum(axis=axis, keepdims=True),)

    return Tensor._from_op(out, "log_softmax", (a,), bw)


def sum_(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def bw(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return Tensor._from_op(out, "sum", (a,), bw)


def mean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = a.data.mean(axis=axis, keepdims=keepdims)
    count = a.size // max(out.size, 1)

    def bw(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape) / count,)

    return Tensor._from_op(out, "mean", (a,), bw)


def reshape(a: Tensor, shape) -> Tensor:
    out = a.data.reshape(shape)
    return Tensor._from_op(out, "reshape", (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Tensor, axes=None) -> Tensor:
    out = np.transpose(a.data, axes)
    inverse = None if axes is None else np.argsort(axes)
    return Tensor._from_op(out, "transpose", (a,), lambda g: (np.transpose(g, inverse),))


def slice_(a: Tensor, index) -> Tensor:
    out = a.data[index]

    def bw(g):
        full = np.zeros_like(a.data)
        np.add.at(full, index, g)
        return (full,)

    return Tensor._from_op(np.array(out, dtype=np.float64), "slice", (a,), bw)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [ensure_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def bw(g):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor._from_op(out, "concat", tensors, bw)
