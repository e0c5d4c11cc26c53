#!/usr/bin/env python3
"""Timing comparison of the numba and numpy kernel twins.

Times the two hot kernels (Black value arrays and the Crank-Nicolson march)
under both backends and reports median wall time plus speedup.  Run from the
repository root after an editable install:

    python3 benchmarks/bench_kernels.py --size 200000 --steps 400
"""

import argparse
import math
import statistics
import time

import numpy as np

from mtdd._backend import HAVE_NUMBA
from mtdd.kernels import black_values_numpy, cn_march_numpy

if HAVE_NUMBA:
    from mtdd.kernels import black_values_numba, cn_march_numba


def time_call(fn, *args, repeats):
    """Median wall time over ``repeats`` calls, after one warmup call."""
    fn(*args)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def bench_black(size, repeats):
    forwards = np.exp(np.linspace(-1.0, 1.0, size)) * 100.0
    args = (forwards, 100.0, 0.2, 1.0, True)
    rows = [("numpy", time_call(black_values_numpy, *args, repeats=repeats))]
    if HAVE_NUMBA:
        rows.append(("numba", time_call(black_values_numba, *args, repeats=repeats)))
    return rows


def bench_cn(size, steps, repeats):
    zeta = np.linspace(-4.0, 4.0, size)
    values = np.maximum(100.0 * np.exp(zeta) - 100.0, 0.0)
    dzeta = zeta[1] - zeta[0]
    tau = 0.02
    lam = (tau / steps) / dzeta**2
    grid = np.linspace(0.0, tau, steps + 1)
    lower = np.zeros(steps + 1)
    upper = 100.0 * np.exp(zeta[-1] + grid) - 100.0
    args = (values, lam, lower, upper)
    rows = [("numpy", time_call(cn_march_numpy, *args, repeats=repeats))]
    if HAVE_NUMBA:
        rows.append(("numba", time_call(cn_march_numba, *args, repeats=repeats)))
    return rows


def print_table(name, rows):
    print(f"\n{name}")
    base = rows[0][1]
    for backend, seconds in rows:
        speedup = base / seconds
        print(f"  {backend:>6}  {seconds * 1e3:10.3f} ms   x{speedup:.2f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=200_000,
                        help="array length for the Black kernel benchmark")
    parser.add_argument("--steps", type=int, default=400,
                        help="time steps (and 1/4 the nodes) for the CN march")
    parser.add_argument("--repeats", type=int, default=7,
                        help="timed repetitions per kernel (median reported)")
    args = parser.parse_args()
    if args.size < 2 or args.steps < 2 or args.repeats < 1:
        parser.error("size and steps must be >= 2, repeats >= 1")

    if not HAVE_NUMBA:
        print("numba is not installed; timing the numpy kernels only")

    print(f"black_values: {args.size} forwards, {args.repeats} repeats")
    print_table("black_values", bench_black(args.size, args.repeats))

    cn_nodes = max(args.steps * 4, 50)
    print(f"\ncn_march: {cn_nodes} nodes x {args.steps} steps, "
          f"{args.repeats} repeats")
    print_table("cn_march", bench_cn(cn_nodes, args.steps, args.repeats))

    if HAVE_NUMBA:
        forwards = np.exp(np.linspace(-1.0, 1.0, 512)) * 100.0
        a = black_values_numpy(forwards, 100.0, 0.2, 1.0, True)
        b = black_values_numba(forwards, 100.0, 0.2, 1.0, True)
        drift = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
        print(f"\nbackend agreement: max rel diff {drift:.2e}")


if __name__ == "__main__":
    main()
