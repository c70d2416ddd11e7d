"""Dense tensors with reverse-mode automatic differentiation.

Values are numpy arrays (float32 by default, float64 in shadow mode for
gradient checks). Every operation that touches a tensor with
``requires_grad=True`` records a backward closure; ``backward()`` walks the
recorded graph once in reverse topological order and accumulates gradients
by summation across fan-out.
"""

from __future__ import annotations

import numpy as np

DEFAULT_DTYPE = np.float32


def set_default_dtype(dtype) -> None:
    """Switch storage precision globally (float64 = shadow mode)."""
    global DEFAULT_DTYPE
    if dtype not in (np.float32, np.float64):
        raise ValueError("only float32/float64 supported")
    DEFAULT_DTYPE = dtype


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum grad down to `shape` (inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """A numpy array plus an optional gradient and backward closure."""

    __slots__ = ("data", "grad", "requires_grad", "_backward", "_prev")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        self.data = np.asarray(data, dtype=dtype or DEFAULT_DTYPE)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._backward = None
        self._prev: tuple = ()

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def param(data, dtype=None) -> "Tensor":
        return Tensor(data, requires_grad=True, dtype=dtype)

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=False, dtype=self.data.dtype)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g.astype(self.data.dtype, copy=True)
        else:
            self.grad = self.grad + g

    # -- graph machinery ------------------------------------------------------

    def _make(self, data, prev, backward) -> "Tensor":
        out = Tensor(data, dtype=data.dtype)
        if any(p.requires_grad for p in prev):
            out.requires_grad = True
            out._prev = tuple(prev)
            out._backward = backward
        return out

    def backward(self) -> None:
        """Backpropagate from a scalar; gradients sum across fan-out."""
        if self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for child in node._prev:
                if id(child) not in visited:
                    stack.append((child, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other, ref_dtype) -> "Tensor":
        if isinstance(other, Tensor):
            return other
        return Tensor(np.asarray(other, dtype=ref_dtype), dtype=ref_dtype)

    def __add__(self, other):
        other = Tensor._coerce(other, self.data.dtype)
        data = self.data + other.data

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g, other.data.shape))

        return self._make(data, (self, other), backward)

    __radd__ = __add__

    def __sub__(self, other):
        other = Tensor._coerce(other, self.data.dtype)
        data = self.data - other.data

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(-g, other.data.shape))

        return self._make(data, (self, other), backward)

    def __rsub__(self, other):
        return Tensor._coerce(other, self.data.dtype) - self

    def __mul__(self, other):
        other = Tensor._coerce(other, self.data.dtype)
        data = self.data * other.data

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g * other.data, self.data.shape))
            if other.requires_grad:
                other._accumulate(_unbroadcast(g * self.data, other.data.shape))

        return self._make(data, (self, other), backward)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __truediv__(self, other):
        other = Tensor._coerce(other, self.data.dtype)
        data = self.data / other.data

        def backward(g):
            if self.requires_grad:
                self._accumulate(_unbroadcast(g / other.data, self.data.shape))
            if other.requires_grad:
                other._accumulate(
                    _unbroadcast(-g * self.data / (other.data ** 2), other.data.shape)
                )

        return self._make(data, (self, other), backward)

    def __matmul__(self, other):
        data = self.data @ other.data

        def backward(g):
            if self.requires_grad:
                self._accumulate(g @ other.data.T)
            if other.requires_grad:
                other._accumulate(self.data.T @ g)

        return self._make(data, (self, other), backward)

    def __getitem__(self, key):
        data = self.data[key]

        def backward(g):
            if self.requires_grad:
                full = np.zeros_like(self.data)
                np.add.at(full, key, g)
                self._accumulate(full)

        return self._make(data, (self,), backward)

    # -- elementwise nonlinearities -------------------------------------------

    def tanh(self):
        data = np.tanh(self.data)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * (1.0 - data ** 2))

        return self._make(data, (self,), backward)

    def sigmoid(self):
        data = 1.0 / (1.0 + np.exp(-self.data))

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * data * (1.0 - data))

        return self._make(data, (self,), backward)

    def relu(self):
        data = np.maximum(self.data, 0.0)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * (self.data > 0))

        return self._make(data, (self,), backward)

    def elu(self):
        data = np.where(self.data > 0, self.data, np.expm1(self.data))

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * np.where(self.data > 0, 1.0, np.exp(self.data)))

        return self._make(data, (self,), backward)

    def exp(self):
        data = np.exp(self.data)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * data)

        return self._make(data, (self,), backward)

    def log(self):
        data = np.log(self.data)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g / self.data)

        return self._make(data, (self,), backward)

    def square(self):
        return self * self

    def clamp_min(self, floor: float):
        """Elementwise max with a constant; gradient passes above the floor."""
        data = np.maximum(self.data, floor)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g * (self.data > floor))

        return self._make(data, (self,), backward)

    # -- reductions & shape ---------------------------------------------------

    def sum(self, axis=None, keepdims=False):
        data = self.data.sum(axis=axis, keepdims=keepdims)

        def backward(g):
            if self.requires_grad:
                if axis is not None and not keepdims:
                    g = np.expand_dims(g, axis)
                self._accumulate(np.broadcast_to(g, self.data.shape).copy())

        return self._make(np.asarray(data, dtype=self.data.dtype), (self,), backward)

    def mean(self, axis=None, keepdims=False):
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        data = self.data.reshape(shape)

        def backward(g):
            if self.requires_grad:
                self._accumulate(g.reshape(self.data.shape))

        return self._make(data, (self,), backward)

    def logsumexp(self, axis: int, keepdims: bool = False):
        """Numerically stable log-sum-exp along one axis."""
        m = np.max(self.data, axis=axis, keepdims=True)
        m = np.where(np.isfinite(m), m, 0.0)
        shifted = self - Tensor(m, dtype=m.dtype)
        out = shifted.exp().sum(axis=axis, keepdims=True).log() + Tensor(m, dtype=m.dtype)
        if not keepdims:
            out = out.reshape(np.squeeze(out.data, axis=axis).shape)
        return out


def concat(tensors: list[Tensor], axis: int = -1) -> Tensor:
    """Concatenate along one axis with gradient routing."""
    datas = [t.data for t in tensors]
    data = np.concatenate(datas, axis=axis)
    sizes = [d.shape[axis] for d in datas]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t._accumulate(g[tuple(idx)])

    out = Tensor(data, dtype=data.dtype)
    if any(t.requires_grad for t in tensors):
        out.requires_grad = True
        out._prev = tuple(tensors)
        out._backward = backward
    return out
