#!/usr/bin/env python3
"""Benchmark the numeric kernels: numba @njit vs the pure-numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--rows 200000] [--points 2000] [--iters 20]

The active backend at import time is controlled by ANNOSPLIT_NUMBA; this
script always times both implementations directly, so it works regardless
of the flag. The first jit call includes compilation (cached afterwards)
and is excluded by the warmup pass.
"""

import argparse
import time

import numpy as np

from annosplit import kernels


def bench(fn, args, iters: int) -> float:
    fn(*args)  # warmup / jit compile
    times = []
    for _ in range(iters):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def row(name: str, numpy_s: float, jit_s: float) -> None:
    speedup = numpy_s / jit_s if jit_s > 0 else float("inf")
    print(f"{name:<24} numpy {numpy_s * 1e3:9.3f} ms   numba {jit_s * 1e3:9.3f} ms   x{speedup:.2f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=200_000,
                        help="instances for entropy/majority batches")
    parser.add_argument("--cols", type=int, default=6, help="label classes")
    parser.add_argument("--points", type=int, default=2_000,
                        help="points for the O(n^2) dominance check")
    parser.add_argument("--iters", type=int, default=20)
    args = parser.parse_args()

    print(f"backend selected by env: {kernels.backend()}")
    if not kernels.HAVE_NUMBA:
        print("numba not importable; the 'numba' column is plain python loops")

    rng = np.random.default_rng(0)
    counts = rng.integers(0, 8, size=(args.rows, args.cols)).astype(np.float64)
    counts[counts.sum(axis=1) == 0, 0] = 1.0
    costs = rng.uniform(0, 10, size=args.points)
    qualities = rng.uniform(0, 1, size=args.points)

    row(
        f"entropy ({args.rows}x{args.cols})",
        bench(kernels.entropy_from_counts_numpy, (counts,), args.iters),
        bench(kernels.entropy_from_counts_jit, (counts,), args.iters),
    )
    row(
        f"majority ({args.rows}x{args.cols})",
        bench(kernels.majority_from_counts_numpy, (counts,), args.iters),
        bench(kernels.majority_from_counts_jit, (counts,), args.iters),
    )
    row(
        f"dominance ({args.points} pts)",
        bench(kernels.dominance_flags_numpy, (costs, qualities), args.iters),
        bench(kernels.dominance_flags_jit, (costs, qualities), args.iters),
    )


if __name__ == "__main__":
    main()
