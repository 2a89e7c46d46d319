# Compiled kernels for the training hot path: dense matmul, row softmax,
# and row layer norm over C-contiguous float64 arrays. Semantics match
# kernels/numpy_ops.py; the dispatcher picks whichever backend is available.

from libc.math cimport exp, sqrt

import numpy as np


def matmul(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], k = a.shape[1], m = b.shape[1]
    if b.shape[0] != k:
        raise ValueError("matmul shape mismatch")
    out_arr = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, p
    cdef double aip
    for i in range(n):
        for p in range(k):
            aip = a[i, p]
            if aip == 0.0:
                continue
            for j in range(m):
                out[i, j] += aip * b[p, j]
    return out_arr


def softmax_rows(double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double hi, s
    for i in range(n):
        hi = x[i, 0]
        for j in range(1, m):
            if x[i, j] > hi:
                hi = x[i, j]
        s = 0.0
        for j in range(m):
            out[i, j] = exp(x[i, j] - hi)
            s += out[i, j]
        for j in range(m):
            out[i, j] /= s
    return out_arr


def layernorm_rows(double[:, ::1] x, double[::1] gain, double[::1] bias, double eps=1e-5):
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    out_arr = np.empty((n, m), dtype=np.float64)
    mean_arr = np.empty(n, dtype=np.float64)
    rstd_arr = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] mean = mean_arr
    cdef double[::1] rstd = rstd_arr
    cdef Py_ssize_t i, j
    cdef double mu, var, d, r
    for i in range(n):
        mu = 0.0
        for j in range(m):
            mu += x[i, j]
        mu /= m
        var = 0.0
        for j in range(m):
            d = x[i, j] - mu
            var += d * d
        var /= m
        r = 1.0 / sqrt(var + eps)
        mean[i] = mu
        rstd[i] = r
        for j in range(m):
            out[i, j] = (x[i, j] - mu) * r * gain[j] + bias[j]
    return out_arr, mean_arr, rstd_arr
