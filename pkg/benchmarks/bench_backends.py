#!/usr/bin/env python3
"""Time the compiled trial kernel against the pure-Python fallback.

Runs the reference 5-stream demand (one 2-cycle plus one 3-cycle) over a
3-antenna relay and reports per-round throughput for a few batch sizes.
"""

import argparse
import time

import numpy as np

import ychannel as yc
from ychannel import backend, phy


def make_inputs(trials, rho, seed):
    d = yc.DofTuple(2, 0, 1, 1, 1, 0)
    plan = yc.build_plan(yc.allocate(d, 3, "joint"), 3)
    channels = yc.sample_channels(3, 3, seed)
    coders = yc.build_coders(channels, rho, plan)
    rng = np.random.default_rng(seed + 1)
    sources = np.array(phy.plan_symbol_sources(plan)) - 1

    def crandn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    symbols = crandn(trials, len(sources)) * coders.user_std[sources]
    return channels, coders, plan, symbols, crandn(trials, 3), crandn(trials, 3, 3)


def time_backend(which, inputs, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        stats = backend.run_trials(*inputs, backend=which)
        best = min(best, time.perf_counter() - start)
    return best, stats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, nargs="+", default=[1000, 10000, 50000])
    parser.add_argument("--rho-db", type=float, default=60.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if "compiled" not in yc.available_backends():
        parser.exit(1, "compiled kernel is not built; nothing to compare\n")

    print(f"{'trials':>8} {'python':>12} {'compiled':>12} {'speedup':>8}  rounds/s (compiled)")
    for trials in args.trials:
        inputs = make_inputs(trials, 10 ** (args.rho_db / 10), args.seed)
        t_py, s_py = time_backend("python", inputs, args.repeats)
        t_cy, s_cy = time_backend("compiled", inputs, args.repeats)
        drift = np.max(np.abs(s_py.sinr() - s_cy.sinr()) / s_py.sinr())
        assert drift < 1e-9, f"backends disagree: {drift}"
        print(
            f"{trials:>8} {t_py:>11.3f}s {t_cy:>11.3f}s {t_py / t_cy:>7.0f}x"
            f"  {trials / t_cy:,.0f}"
        )


if __name__ == "__main__":
    main()
