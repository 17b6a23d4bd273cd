#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-numpy trial kernels.

Usage: python benchmarks/bench_kernels.py [--trials N]
"""

import argparse
import time

import numpy as np

from bellswap import kernels
from bellswap.modes import sigma_from_db

POINTS = [
    # (n, s_c, sigma_db) spanning small to large state tables
    (2, 0, 15.0),
    (4, 0, 15.0),
    (5, 1, 15.0),
    (6, 2, 12.0),
    (8, 3, 10.0),
]


def time_impl(impl, n, s_c, sigma_db, trials):
    kern = kernels.make_kernel(n, sigma_from_db(sigma_db), s_c, 0.99, impl=impl)
    rng = np.random.default_rng(1)
    kernels.batch_trials(kern, min(trials, 256), rng)  # warm-up
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    kernels.batch_trials(kern, trials, rng)
    return trials / (time.perf_counter() - start)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20000)
    args = parser.parse_args()

    impls = kernels.available_impls()
    if "compiled" not in impls:
        print("note: compiled kernel not built; timing the python kernel only")
    header = f"{'point':>18} " + " ".join(f"{impl:>14}" for impl in impls)
    print(header + ("      speedup" if len(impls) == 2 else ""))
    for n, s_c, sigma_db in POINTS:
        trials = args.trials if n < 7 else max(args.trials // 4, 1000)
        rates = [time_impl(impl, n, s_c, sigma_db, trials) for impl in impls]
        label = f"n={n} s_c={s_c} {sigma_db:g}dB"
        row = f"{label:>18} " + " ".join(f"{rate:>11.0f}/s" for rate in rates)
        if len(rates) == 2:
            row += f"  {rates[0] / rates[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
