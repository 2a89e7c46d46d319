"""Kernel backend selection for the training hot path.

The compiled extension is preferred when it imported cleanly; the numpy
implementations are the fallback. ``GOHR_KERNELS=py`` or ``=c`` forces a
backend (forcing ``c`` without the extension raises). All callers go
through the module-level functions so tests and benchmarks can swap
backends at runtime with ``set_backend``.

Matrix products stay on numpy's BLAS under both backends: the fused row
kernels (softmax, layer norm) win compiled, dense matmul does not (see
benchmarks/bench_kernels.py). The extension still ships a reference matmul
so the benchmark can document that choice.
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_ops

try:
    from .. import _ckernels
except ImportError:  # extension not built; numpy fallback only
    _ckernels = None


class _CWrapper:
    NAME = "cython"

    # BLAS beats the naive compiled loop on every shape we use.
    matmul = staticmethod(numpy_ops.matmul)

    @staticmethod
    def softmax_rows(x):
        return _ckernels.softmax_rows(np.ascontiguousarray(x))

    @staticmethod
    def layernorm_rows(x, gain, bias, eps=1e-5):
        return _ckernels.layernorm_rows(
            np.ascontiguousarray(x), np.ascontiguousarray(gain), np.ascontiguousarray(bias), eps
        )


_BACKENDS = {"numpy": numpy_ops}
if _ckernels is not None:
    _BACKENDS["cython"] = _CWrapper

_active = numpy_ops
_forced = os.environ.get("GOHR_KERNELS", "").lower()
if _forced in ("c", "cython"):
    if _ckernels is None:
        raise ImportError("GOHR_KERNELS=c requested but the compiled extension is missing")
    _active = _CWrapper
elif _forced in ("py", "numpy", ""):
    if _forced == "" and _ckernels is not None:
        _active = _CWrapper
else:
    raise ValueError(f"unknown GOHR_KERNELS value: {_forced!r}")


def available_backends() -> list[str]:
    return list(_BACKENDS)


def backend_name() -> str:
    return _active.NAME


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = _BACKENDS[name]


def matmul(a, b):
    return _active.matmul(a, b)


def softmax_rows(x):
    return _active.softmax_rows(x)


def layernorm_rows(x, gain, bias, eps=1e-5):
    return _active.layernorm_rows(x, gain, bias, eps)
