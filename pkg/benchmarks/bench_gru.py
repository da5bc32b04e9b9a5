"""Benchmark the compiled GRU kernel against the pure-numpy fallback.

Usage: python3 benchmarks/bench_gru.py [--repeats N]
"""

import argparse
import time

import numpy as np

from clozegen.readers.kernels import available_backends, gru_numpy

try:
    from clozegen.readers.kernels import _gru_cy
except ImportError:
    _gru_cy = None


def bench(kernel, x, h0, W, U, b, dH, repeats):
    # warm-up
    H, cache = kernel.gru_forward(x, h0, W, U, b)
    kernel.gru_backward(cache, dH)
    t0 = time.perf_counter()
    for _ in range(repeats):
        H, cache = kernel.gru_forward(x, h0, W, U, b)
    t_fwd = (time.perf_counter() - t0) / repeats
    t0 = time.perf_counter()
    for _ in range(repeats):
        kernel.gru_backward(cache, dH)
    t_bwd = (time.perf_counter() - t0) / repeats
    return t_fwd, t_bwd, H


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=50)
    args = ap.parse_args()

    print(f"available backends: {available_backends()}")
    rng = np.random.default_rng(0)
    shapes = [(20, 100, 150), (80, 300, 150), (200, 300, 150)]
    print(f"{'T':>5} {'d':>5} {'h':>5} | {'numpy fwd':>10} {'numpy bwd':>10}"
          f" | {'cython fwd':>10} {'cython bwd':>10} | {'speedup':>7}")
    for T, d, h in shapes:
        x = rng.normal(size=(T, d))
        h0 = np.zeros(h)
        W = rng.normal(size=(d, 3 * h)) * 0.1
        U = rng.normal(size=(h, 3 * h)) * 0.1
        b = np.zeros(3 * h)
        dH = rng.normal(size=(T, h))
        nf, nb, H_np = bench(gru_numpy, x, h0, W, U, b, dH, args.repeats)
        if _gru_cy is None:
            print(f"{T:>5} {d:>5} {h:>5} | {nf*1e3:>8.2f}ms {nb*1e3:>8.2f}ms"
                  f" | {'n/a':>10} {'n/a':>10} | {'n/a':>7}")
            continue
        cf, cb, H_cy = bench(_gru_cy, x, h0, W, U, b, dH, args.repeats)
        assert np.allclose(H_np, H_cy, rtol=1e-12, atol=1e-12)
        speedup = (nf + nb) / (cf + cb)
        print(f"{T:>5} {d:>5} {h:>5} | {nf*1e3:>8.2f}ms {nb*1e3:>8.2f}ms"
              f" | {cf*1e3:>8.2f}ms {cb*1e3:>8.2f}ms | {speedup:>6.2f}x")


if __name__ == "__main__":
    main()
