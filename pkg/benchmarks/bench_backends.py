#!/usr/bin/env python3
"""Benchmark the compiled chunk kernel against the pure-Python fallback.

Runs the d=10 benchmark landscape's inner loop for a fixed number of
iterations through both backends and reports steps/second and speedup.

Usage: python3 benchmarks/bench_backends.py [--steps N] [--dim D]
"""
import argparse
import time

import numpy as np

from heavyball._kernels import _pyloop

try:
    from heavyball._kernels import _fastloop
except ImportError:
    _fastloop = None

CHUNK = 4096


def run(mod, steps, dim, cubic=True, seed=0):
    rng = np.random.default_rng(seed)
    lam = np.linspace(9.0, -9.0, dim)
    x = 1e-3 * rng.standard_normal(dim)
    v = np.zeros(dim)
    t0 = time.perf_counter()
    done = 0
    while done < steps:
        n = min(CHUNK, steps - done)
        z2 = rng.standard_normal((n, dim))
        mod.hb_chunk(x, v, lam, cubic, 1.0, 1e-3, 0.0, 0.1,
                     z2, np.zeros((1, 1)), -1e18)
        done += n
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2_000_000)
    ap.add_argument("--dim", type=int, default=10)
    args = ap.parse_args()

    t_py = run(_pyloop, args.steps, args.dim)
    print(f"python  backend: {args.steps / t_py:12.0f} steps/s  ({t_py:.2f}s)")
    if _fastloop is None:
        print("cython  backend: not built")
        return
    t_cy = run(_fastloop, args.steps, args.dim)
    print(f"cython  backend: {args.steps / t_cy:12.0f} steps/s  ({t_cy:.2f}s)")
    print(f"speedup: {t_py / t_cy:.1f}x")


if __name__ == "__main__":
    main()
