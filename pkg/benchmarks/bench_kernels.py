"""Benchmark the compiled kernel backend against the numpy fallback.

Shapes mirror the training hot path: FC token batches (20 x 144 inputs into
a 64-wide trunk) and OC object batches (63 x 24). The dispatcher's policy
follows these numbers: fused row kernels (softmax, layer norm) run
compiled, dense matmul stays on BLAS under both backends; the compiled
reference matmul is timed here to document that choice.

Run:  python benchmarks/bench_kernels.py [--repeats 2000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gohr.learner import kernels
from gohr.learner.kernels import numpy_ops

try:
    from gohr.learner import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, repeats: int) -> float:
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats * 1e6  # us/call


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = {
        "matmul 20x144 @ 144x64": (rng.normal(size=(20, 144)), rng.normal(size=(144, 64))),
        "matmul 20x64 @ 64x64": (rng.normal(size=(20, 64)), rng.normal(size=(64, 64))),
        "matmul 63x24 @ 24x64": (rng.normal(size=(63, 24)), rng.normal(size=(24, 64))),
        "matmul 1x2880 @ 2880x144": (rng.normal(size=(1, 2880)), rng.normal(size=(2880, 144))),
    }
    soft = rng.normal(size=(20, 20)) * 3
    ln_x = rng.normal(size=(20, 64))
    gain, bias = np.ones(64), np.zeros(64)

    print(f"available backends: {kernels.available_backends()}  (active: {kernels.backend_name()})")
    print(f"{'kernel':34s} {'numpy us':>10s} {'cython us':>10s} {'speedup':>8s}")

    def row(name, np_fn, c_fn):
        t_np = timeit(np_fn, args.repeats)
        if c_fn is None:
            print(f"{name:34s} {t_np:10.2f} {'-':>10s} {'-':>8s}")
            return
        t_c = timeit(c_fn, args.repeats)
        print(f"{name:34s} {t_np:10.2f} {t_c:10.2f} {t_np / t_c:8.2f}x")

    for name, (a, b) in cases.items():
        row(name, lambda a=a, b=b: numpy_ops.matmul(a, b),
            None if _ckernels is None else (lambda a=a, b=b: _ckernels.matmul(a, b)))
    row("softmax_rows 20x20",
        lambda: numpy_ops.softmax_rows(soft),
        None if _ckernels is None else (lambda: _ckernels.softmax_rows(soft)))
    row("layernorm_rows 20x64",
        lambda: numpy_ops.layernorm_rows(ln_x, gain, bias),
        None if _ckernels is None else (lambda: _ckernels.layernorm_rows(ln_x, gain, bias)))

    print("\ndispatch policy: softmax/layernorm -> compiled when available; matmul -> BLAS always")


if __name__ == "__main__":
    main()
