"""Minimal reverse-mode autodiff over numpy arrays.

Just enough surface for the readers: elementwise arithmetic, matmul,
concatenation, activations, row softmax, and gather/stack. Gradients are
accumulated into ``Tensor.grad`` by :meth:`Tensor.backward` on a scalar.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "parents", "backward_fn")

    def __init__(self, data, requires_grad=False, parents=(), backward_fn=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)
        self.parents = parents
        self.backward_fn = backward_fn

    @property
    def shape(self):
        return self.data.shape

    def _accum(self, g):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self):
        if self.data.ndim != 0 and self.data.size != 1:
            raise ValueError("backward() requires a scalar loss")
        topo = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node.parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node.backward_fn is not None and node.grad is not None:
                node.backward_fn(node.grad)

    # convenience operators
    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(grad, shape):
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for i, s in enumerate(shape):
        if s == 1 and grad.shape[i] != 1:
            grad = grad.sum(axis=i, keepdims=True)
    return grad.reshape(shape)


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data + b.data, parents=(a, b))

    def backward(g):
        if a.requires_grad:
            a._accum(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._accum(_unbroadcast(g, b.data.shape))
    out.backward_fn = backward
    return out


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data * b.data, parents=(a, b))

    def backward(g):
        if a.requires_grad:
            a._accum(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b._accum(_unbroadcast(g * a.data, b.data.shape))
    out.backward_fn = backward
    return out


def scale(a, s: float):
    return mul(a, Tensor(np.float64(s)))


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data @ b.data, parents=(a, b))
    ad, bd = a.data, b.data

    def backward(g):
        if a.requires_grad:
            if ad.ndim == 2 and bd.ndim == 2:
                a._accum(g @ bd.T)
            elif ad.ndim == 1 and bd.ndim == 2:
                a._accum(bd @ g)
            elif ad.ndim == 2 and bd.ndim == 1:
                a._accum(np.outer(g, bd))
            else:  # 1D @ 1D
                a._accum(g * bd)
        if b.requires_grad:
            if ad.ndim == 2 and bd.ndim == 2:
                b._accum(ad.T @ g)
            elif ad.ndim == 1 and bd.ndim == 2:
                b._accum(np.outer(ad, g))
            elif ad.ndim == 2 and bd.ndim == 1:
                b._accum(ad.T @ g)
            else:
                b._accum(g * ad)
    out.backward_fn = backward
    return out


def concat(parts, axis=0):
    parts = [as_tensor(p) for p in parts]
    out = Tensor(np.concatenate([p.data for p in parts], axis=axis),
                 parents=tuple(parts))
    sizes = [p.data.shape[axis] for p in parts]

    def backward(g):
        offset = 0
        for p, size in zip(parts, sizes):
            if p.requires_grad:
                sl = [slice(None)] * g.ndim
                sl[axis] = slice(offset, offset + size)
                p._accum(g[tuple(sl)])
            offset += size
    out.backward_fn = backward
    return out


def flip_rows(a):
    a = as_tensor(a)
    out = Tensor(a.data[::-1].copy(), parents=(a,))

    def backward(g):
        if a.requires_grad:
            a._accum(g[::-1])
    out.backward_fn = backward
    return out


def transpose(a):
    a = as_tensor(a)
    out = Tensor(a.data.T, parents=(a,))

    def backward(g):
        if a.requires_grad:
            a._accum(g.T)
    out.backward_fn = backward
    return out


def tanh(a):
    a = as_tensor(a)
    y = np.tanh(a.data)
    out = Tensor(y, parents=(a,))

    def backward(g):
        if a.requires_grad:
            a._accum(g * (1.0 - y * y))
    out.backward_fn = backward
    return out


def sigmoid(a):
    a = as_tensor(a)
    y = 1.0 / (1.0 + np.exp(-a.data))
    out = Tensor(y, parents=(a,))

    def backward(g):
        if a.requires_grad:
            a._accum(g * y * (1.0 - y))
    out.backward_fn = backward
    return out


def relu(a):
    a = as_tensor(a)
    out = Tensor(np.maximum(a.data, 0.0), parents=(a,))

    def backward(g):
        if a.requires_grad:
            a._accum(g * (a.data > 0))
    out.backward_fn = backward
    return out


def row_softmax(a):
    """Softmax along the last axis (rows of a matrix or a single vector)."""
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=-1, keepdims=True)
    out = Tensor(y, parents=(a,))

    def backward(g):
        if a.requires_grad:
            dot = (g * y).sum(axis=-1, keepdims=True)
            a._accum(y * (g - dot))
    out.backward_fn = backward
    return out


def log_softmax(a):
    a = as_tensor(a)
    shifted = a.data - a.data.max()
    lse = np.log(np.exp(shifted).sum())
    y = shifted - lse
    out = Tensor(y, parents=(a,))

    def backward(g):
        if a.requires_grad:
            p = np.exp(y)
            a._accum(g - p * g.sum())
    out.backward_fn = backward
    return out


def nll_loss(logits, gold_index: int):
    """Negative log-likelihood of ``gold_index`` under softmax(logits)."""
    ls = log_softmax(logits)
    out = Tensor(-ls.data[gold_index], parents=(ls,))

    def backward(g):
        if ls.requires_grad:
            grad = np.zeros_like(ls.data)
            grad[gold_index] = -g
            ls._accum(grad)
    out.backward_fn = backward
    return out


def get_row(a, i: int):
    a = as_tensor(a)
    out = Tensor(a.data[i], parents=(a,))

    def backward(g):
        if a.requires_grad:
            grad = np.zeros_like(a.data)
            grad[i] = g
            a._accum(grad)
    out.backward_fn = backward
    return out


def gather_rows(a, indices):
    """Select rows of a 2D tensor; backward scatter-adds."""
    a = as_tensor(a)
    idx = np.asarray(indices, dtype=np.intp)
    out = Tensor(a.data[idx], parents=(a,))

    def backward(g):
        if a.requires_grad:
            grad = np.zeros_like(a.data)
            np.add.at(grad, idx, g)
            a._accum(grad)
    out.backward_fn = backward
    return out


def stack_rows(parts):
    parts = [as_tensor(p) for p in parts]
    out = Tensor(np.stack([p.data for p in parts]), parents=tuple(parts))

    def backward(g):
        for i, p in enumerate(parts):
            if p.requires_grad:
                p._accum(g[i])
    out.backward_fn = backward
    return out


def add_n(parts):
    parts = [as_tensor(p) for p in parts]
    out = Tensor(sum(p.data for p in parts), parents=tuple(parts))

    def backward(g):
        for p in parts:
            if p.requires_grad:
                p._accum(g)
    out.backward_fn = backward
    return out
