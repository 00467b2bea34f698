"""Benchmark the dense star-product kernel: compiled extension vs NumPy.

Times the flat mode-shift star on representative 1D and 2D problem sizes
(the kernel is O(X * M^2), the dominant cost of the response pipeline) and
prints the per-call time of each backend plus the speedup.

Usage: python3 benchmarks/benchmark_star.py [--repeat R]
"""

import argparse
import time

import numpy as np

from latticeweyl import kernels


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(label, xdims, ndims, repeat, rng):
    x_tot = int(np.prod(xdims))
    m_tot = int(np.prod(ndims))
    a = rng.normal(size=(x_tot, m_tot)) + 1j * rng.normal(size=(x_tot, m_tot))
    b = rng.normal(size=(x_tot, m_tot)) + 1j * rng.normal(size=(x_tot, m_tot))

    ref = kernels.star_modes_dense(a, b, xdims, ndims, force_fallback=True)
    t_np = time_call(
        lambda: kernels.star_modes_dense(a, b, xdims, ndims,
                                         force_fallback=True), repeat)
    if kernels.backend() == "cython":
        out = kernels.star_modes_dense(a, b, xdims, ndims)
        dev = np.abs(out - ref).max()
        t_cy = time_call(
            lambda: kernels.star_modes_dense(a, b, xdims, ndims), repeat)
        print("%-18s numpy %8.1f ms   cython %8.1f ms   speedup %5.1fx"
              "   max dev %.2e"
              % (label, 1e3 * t_np, 1e3 * t_cy, t_np / t_cy, dev))
    else:
        print("%-18s numpy %8.1f ms   (extension unavailable)"
              % (label, 1e3 * t_np))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions, best-of (default 3)")
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print("active backend:", kernels.backend())
    bench_case("chain N=32", (64,), (64,), args.repeat, rng)
    bench_case("chain N=128", (256,), (256,), args.repeat, rng)
    bench_case("grid 6x6", (12, 12), (12, 12), args.repeat, rng)
    bench_case("grid 10x10", (20, 20), (20, 20), args.repeat, rng)


if __name__ == "__main__":
    main()
