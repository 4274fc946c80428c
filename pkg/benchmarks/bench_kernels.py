#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs each hot kernel on a representative workload and prints the timing
ratio.  The numpy path is also what you get at runtime with
JACOBISPEC_NO_NUMBA=1.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from jacobispec import _kernels as K
from jacobispec.params import ExpansionOrder, PowerAsymptotics, materialize
from jacobispec.recurrence import solve_at_zero


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not K.NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable; nothing to compare")

    model = PowerAsymptotics(
        beta1=2, beta2=0, x0=1, y0=1, x1=2, x2=1, order=ExpansionOrder.SECOND
    )
    seq = materialize(model, 10_000)
    sol = solve_at_zero(seq)
    diag = np.ascontiguousarray(seq.q[:2000])
    offsq = np.ascontiguousarray(seq.rho[:1999] ** 2)
    shifts = np.linspace(-1e4, 1e4, 2000)
    xs = np.linspace(-1e4, 1e4, 20_000)
    zs = (np.linspace(1, 100, 512) * (1 + 1j)).astype(np.complex128)

    cases = [
        (
            "solve_three_term (N=10k)",
            lambda: K.solve_three_term_numba(seq.rho, seq.q, 1.0, -seq.q[0] / seq.rho[0]),
            lambda: K.solve_three_term_numpy(seq.rho, seq.q, 1.0, -seq.q[0] / seq.rho[0]),
        ),
        (
            "sturm_counts (N=2k x 2k shifts)",
            lambda: K.sturm_counts_numba(diag, offsq, shifts),
            lambda: K.sturm_counts_numpy(diag, offsq, shifts),
        ),
        (
            "transfer_real (N=2k x 20k pts)",
            lambda: K.transfer_real_numba(sol.P, sol.Q, xs, 2000),
            lambda: K.transfer_real_numpy(sol.P, sol.Q, xs, 2000),
        ),
        (
            "transfer_complex (N=2k x 512 pts)",
            lambda: K.transfer_complex_numba(sol.P, sol.Q, zs, 2000),
            lambda: K.transfer_complex_numpy(sol.P, sol.Q, zs, 2000),
        ),
    ]

    print(f"{'kernel':36s} {'numba':>10s} {'numpy':>10s} {'speedup':>9s}")
    for name, fn_nb, fn_np in cases:
        fn_nb()  # trigger JIT compilation outside the timing
        t_nb = timeit(fn_nb, args.repeat)
        t_np = timeit(fn_np, args.repeat)
        print(f"{name:36s} {t_nb * 1e3:9.1f}ms {t_np * 1e3:9.1f}ms {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
