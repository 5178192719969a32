#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot paths on a representative workload:

* pair search: multistart Levenberg-Marquardt over restarts
  (numba: scalar loops, parallel over restarts; numpy: batched linear algebra)
* alternating projection reconstruction (same source, compiled vs interpreted)

Usage: python benchmarks/bench_backends.py [--restarts R] [--signals S]
"""

import argparse
import time

import numpy as np

from conjpr import _kernels, measure, random_frame, rng_stream
from conjpr.lift import lift_dim, omega_matrix


def time_call(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pair_search(restarts):
    frame = random_frame(4, 10, seed=0)
    phi = frame.matrix
    starts = rng_stream(1, 0).standard_normal((restarts, 16))
    rows = []
    if _kernels.USING_NUMBA:
        _kernels._lm_search_all(phi, starts[:2], 0.1, 1e3, 100)  # compile
        rows.append(
            ("pair search", "numba", time_call(_kernels._lm_search_all, phi, starts, 0.1, 1e3, 100))
        )
    rows.append(
        ("pair search", "numpy", time_call(_kernels._lm_search_batched, phi, starts, 0.1, 1e3, 100))
    )
    return rows


def bench_altproj(signals):
    frame = random_frame(5, 14, seed=0)
    om = omega_matrix(frame)
    pinv = np.linalg.pinv(om)
    rng = rng_stream(2, 0)
    problems = []
    for _ in range(signals):
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        b = measure(frame, x).values
        v0s = rng.standard_normal((50, lift_dim(5)))
        problems.append((b, v0s))

    def run(core):
        for b, v0s in problems:
            core(om, pinv, b, v0s, 500, 1e-10)

    rows = []
    if _kernels.USING_NUMBA:
        first = problems[0]
        _kernels._altproj_core(om, pinv, first[0], first[1][:1], 3, 1e-10)  # compile
        rows.append(("altproj", "numba", time_call(run, _kernels._altproj_core)))
        rows.append(("altproj", "numpy", time_call(run, _kernels._altproj_core.py_func)))
    else:
        rows.append(("altproj", "numpy", time_call(run, _kernels._altproj_core)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--restarts", type=int, default=2000)
    parser.add_argument("--signals", type=int, default=20)
    args = parser.parse_args()

    print(f"active backend: {_kernels.backend_name()}")
    if not _kernels.USING_NUMBA:
        print("numba unavailable or disabled (CPR_BACKEND=numpy): numpy rows only")
    rows = bench_pair_search(args.restarts) + bench_altproj(args.signals)

    print()
    print(f"{'kernel':<14}{'backend':<10}{'seconds':>10}  {'relative':>9}")
    baselines = {}
    for kernel, backend, seconds in rows:
        baselines.setdefault(kernel, seconds)
        print(f"{kernel:<14}{backend:<10}{seconds:>10.3f}  {seconds / baselines[kernel]:>8.2f}x")


if __name__ == "__main__":
    main()
