"""Minimal reverse-mode autodiff over float64 numpy arrays.

Covers exactly the ops the transformer policy/critic and the training
losses need. The backward pass walks the graph once in reverse topological
order; gradients accumulate into ``.grad``. Heavy forward kernels (matmul,
row softmax, row layer norm) are routed through the kernels dispatcher so
the compiled backend is used when available.
"""

from __future__ import annotations

import numpy as np

from . import kernels


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce a broadcasted gradient back to the original shape."""
    g = grad
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, parents=(), backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = parents
        self._backward = backward

    @staticmethod
    def param(data) -> "Tensor":
        return Tensor(np.array(data, dtype=np.float64), requires_grad=True)

    @property
    def shape(self):
        return self.data.shape

    def _accum(self, g):
        self.grad = g if self.grad is None else self.grad + g

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() starts from a scalar loss")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is not None and node.requires_grad:
                node._backward()

    def item(self) -> float:
        return float(self.data)

    # Convenience operators; everything routes through module functions.
    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return add(self, scale(other, -1.0) if isinstance(other, Tensor) else -other)


def _make(data, parents, backward_builder):
    req = any(p.requires_grad for p in parents)
    out = Tensor(data, requires_grad=req, parents=tuple(parents) if req else ())
    if req:
        out._backward = backward_builder(out)
    return out


def add(a: Tensor, b) -> Tensor:
    if not isinstance(b, Tensor):
        shifted = a.data + np.asarray(b, dtype=np.float64)

        def bb(out):
            def back():
                if a.requires_grad:
                    a._accum(_unbroadcast(out.grad, a.data.shape))
            return back

        return _make(shifted, (a,), bb)

    def bb(out):
        def back():
            if a.requires_grad:
                a._accum(_unbroadcast(out.grad, a.data.shape))
            if b.requires_grad:
                b._accum(_unbroadcast(out.grad, b.data.shape))
        return back

    return _make(a.data + b.data, (a, b), bb)


def mul(a: Tensor, b) -> Tensor:
    if not isinstance(b, Tensor):
        return scale(a, float(b))

    def bb(out):
        def back():
            if a.requires_grad:
                a._accum(_unbroadcast(out.grad * b.data, a.data.shape))
            if b.requires_grad:
                b._accum(_unbroadcast(out.grad * a.data, b.data.shape))
        return back

    return _make(a.data * b.data, (a, b), bb)


def scale(a: Tensor, s: float) -> Tensor:
    def bb(out):
        def back():
            a._accum(out.grad * s)
        return back

    return _make(a.data * s, (a,), bb)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    data = kernels.matmul(a.data, b.data)

    def bb(out):
        def back():
            if a.requires_grad:
                a._accum(kernels.matmul(out.grad, b.data.T))
            if b.requires_grad:
                b._accum(kernels.matmul(a.data.T, out.grad))
        return back

    return _make(data, (a, b), bb)


def transpose(a: Tensor) -> Tensor:
    def bb(out):
        def back():
            a._accum(out.grad.T)
        return back

    return _make(a.data.T, (a,), bb)


def reshape(a: Tensor, shape) -> Tensor:
    def bb(out):
        def back():
            a._accum(out.grad.reshape(a.data.shape))
        return back

    return _make(a.data.reshape(shape), (a,), bb)


def relu(a: Tensor) -> Tensor:
    keep = a.data > 0

    def bb(out):
        def back():
            a._accum(out.grad * keep)
        return back

    return _make(a.data * keep, (a,), bb)


def exp(a: Tensor) -> Tensor:
    data = np.exp(a.data)

    def bb(out):
        def back():
            a._accum(out.grad * data)
        return back

    return _make(data, (a,), bb)


def square(a: Tensor) -> Tensor:
    def bb(out):
        def back():
            a._accum(out.grad * 2.0 * a.data)
        return back

    return _make(a.data * a.data, (a,), bb)


def tsum(a: Tensor) -> Tensor:
    def bb(out):
        def back():
            a._accum(np.full(a.data.shape, float(out.grad)))
        return back

    return _make(a.data.sum(), (a,), bb)


def tmean(a: Tensor) -> Tensor:
    n = a.data.size

    def bb(out):
        def back():
            a._accum(np.full(a.data.shape, float(out.grad) / n))
        return back

    return _make(a.data.mean(), (a,), bb)


def mean_rows(a: Tensor) -> Tensor:
    """Mean over rows of a 2-D tensor, kept 2-D with shape (1, d)."""
    n = a.data.shape[0]

    def bb(out):
        def back():
            a._accum(np.repeat(out.grad, n, axis=0) / n)
        return back

    return _make(a.data.mean(axis=0, keepdims=True), (a,), bb)


def rows(a: Tensor, start: int, stop: int) -> Tensor:
    def bb(out):
        def back():
            g = np.zeros_like(a.data)
            g[start:stop] = out.grad
            a._accum(g)
        return back

    return _make(a.data[start:stop], (a,), bb)


def cols(a: Tensor, start: int, stop: int) -> Tensor:
    def bb(out):
        def back():
            g = np.zeros_like(a.data)
            g[:, start:stop] = out.grad
            a._accum(g)
        return back

    return _make(a.data[:, start:stop], (a,), bb)


def concat_cols(parts: list[Tensor]) -> Tensor:
    widths = [p.data.shape[1] for p in parts]
    data = np.concatenate([p.data for p in parts], axis=1)

    def bb(out):
        def back():
            offset = 0
            for p, w in zip(parts, widths):
                if p.requires_grad:
                    p._accum(out.grad[:, offset : offset + w])
                offset += w
        return back

    return _make(data, tuple(parts), bb)


def repeat_rows(a: Tensor, times: int) -> Tensor:
    """Repeat each row of (s, d) ``times`` times consecutively -> (s*times, d)."""
    s, d = a.data.shape

    def bb(out):
        def back():
            a._accum(out.grad.reshape(s, times, d).sum(axis=1))
        return back

    return _make(np.repeat(a.data, times, axis=0), (a,), bb)


def take(a: Tensor, indices) -> Tensor:
    idx = np.asarray(indices, dtype=np.intp)

    def bb(out):
        def back():
            g = np.zeros_like(a.data)
            np.add.at(g, idx, out.grad)
            a._accum(g)
        return back

    return _make(a.data[idx], (a,), bb)


def softmax_rows(a: Tensor) -> Tensor:
    p = kernels.softmax_rows(a.data)

    def bb(out):
        def back():
            inner = (out.grad * p).sum(axis=1, keepdims=True)
            a._accum(p * (out.grad - inner))
        return back

    return _make(p, (a,), bb)


def layernorm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    y, mean, rstd = kernels.layernorm_rows(x.data, gain.data, bias.data, eps)
    xhat = (x.data - mean[:, None]) * rstd[:, None]

    def bb(out):
        def back():
            g = out.grad
            if gain.requires_grad:
                gain._accum((g * xhat).sum(axis=0))
            if bias.requires_grad:
                bias._accum(g.sum(axis=0))
            if x.requires_grad:
                dxhat = g * gain.data
                m1 = dxhat.mean(axis=1, keepdims=True)
                m2 = (dxhat * xhat).mean(axis=1, keepdims=True)
                x._accum((dxhat - m1 - xhat * m2) * rstd[:, None])
        return back

    return _make(y, (x, gain, bias), bb)


def masked_log_softmax(z: Tensor, mask: np.ndarray) -> Tensor:
    """Log-probabilities over the unmasked entries; masked entries get -inf.

    Masked probabilities are exactly zero downstream (exp(-inf)); gradients
    never flow into masked logits.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("mask excludes every action")
    zm = np.where(mask, z.data, -np.inf)
    hi = zm[mask].max()
    lse = hi + np.log(np.exp(zm[mask] - hi).sum())
    logp = np.where(mask, z.data - lse, -np.inf)
    p = np.where(mask, np.exp(logp), 0.0)

    def bb(out):
        def back():
            g = np.where(mask, out.grad, 0.0)
            z._accum(np.where(mask, g - p * g.sum(), 0.0))
        return back

    return _make(logp, (z,), bb)


def entropy_from_logp(logp: Tensor, mask: np.ndarray) -> Tensor:
    """Categorical entropy of a masked log-softmax output (a scalar Tensor)."""
    idx = np.flatnonzero(np.asarray(mask, dtype=bool))
    lp = take(logp, idx)
    return scale(tsum(mul(exp(lp), lp)), -1.0)
