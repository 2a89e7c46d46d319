"""Finite-difference verification of analytic gradients."""

from __future__ import annotations

import numpy as np


def gradient_check(params, loss_fn, rng: np.random.Generator,
                   n_samples: int = 100, h: float = 1e-4) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``params`` is a list of (name, Tensor); ``loss_fn`` rebuilds the loss
    from the current parameter values. Checks ``n_samples`` randomly chosen
    parameter coordinates spread over all tensors.
    """
    for _, t in params:
        t.grad = None
    loss = loss_fn()
    loss.backward()
    grads = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for _, t in params]

    sizes = np.array([t.data.size for _, t in params])
    total = int(sizes.sum())
    chosen = rng.choice(total, size=min(n_samples, total), replace=False)
    bounds = np.cumsum(sizes)

    worst = 0.0
    for flat in chosen:
        pi = int(np.searchsorted(bounds, flat, side="right"))
        offset = int(flat - (bounds[pi - 1] if pi else 0))
        tensor = params[pi][1]
        view = tensor.data.reshape(-1)
        orig = view[offset]
        view[offset] = orig + h
        up = float(loss_fn().data)
        view[offset] = orig - h
        down = float(loss_fn().data)
        view[offset] = orig
        fd = (up - down) / (2.0 * h)
        analytic = float(grads[pi].reshape(-1)[offset])
        err = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-6)
        worst = max(worst, err)
    return worst
