"""Pure-numpy kernel implementations (fallback backend)."""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b


def softmax_rows(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def layernorm_rows(x: np.ndarray, gain: np.ndarray, bias: np.ndarray,
                   eps: float = 1e-5) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-wise layer norm; returns (y, mean, rstd) so backward can reuse them."""
    mean = x.mean(axis=1, keepdims=True)
    var = ((x - mean) ** 2).mean(axis=1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + eps)
    y = (x - mean) * rstd * gain + bias
    return y, mean.reshape(-1), rstd.reshape(-1)
