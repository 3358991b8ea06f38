#!/usr/bin/env python3
"""Benchmark the compiled evaluation kernels against the numpy fallback.

Times the two kernel functions on representative shapes, then a batch of
full solver runs per backend, and checks that both backends produce
identical outcomes.

Usage: python benchmarks/bench_kernels.py [--agents N] [--values D] [--reps R]
"""

import argparse
import time

import numpy as np

from udcop import kernels
from udcop.engine import SolverParams, format_trace, run
from udcop.generator import GenConfig, generate


def time_call(fn, reps):
    start = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - start) / reps


def bench_kernels(n, d, reps):
    rng = np.random.default_rng(0)
    unary = rng.integers(0, 10, size=d).astype(np.float64)
    ids = np.arange(1, n, dtype=np.int64)
    vals = rng.integers(0, d, size=n - 1).astype(np.int64)
    weights = rng.integers(1, 5, size=(n, d, d)).astype(np.int64)

    print(f"kernel micro-benchmark (n={n}, d={d}, {reps} calls)")
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        unit = time_call(lambda: kernels.eval_all_unit(unary, vals, 0.95), reps)
        weighted = time_call(
            lambda: kernels.eval_all_weighted(unary, ids, vals, weights, 0.95), reps)
        print(f"  {backend:>8}: eval_all_unit {unit * 1e6:8.2f} us/call   "
              f"eval_all_weighted {weighted * 1e6:8.2f} us/call")


def bench_runs(n, d, runs):
    print(f"full solver runs (n={n}, d={d}, {runs} runs of dbo, 100-round budget)")
    outcomes = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        start = time.perf_counter()
        batch = []
        for k in range(runs):
            inst = generate(GenConfig(n=n, d=d, density=0.4, seed=1000 + k))
            outcome, traces = run(inst, "dbo", SolverParams(), seed=k,
                                  round_budget=100)
            batch.append((outcome, format_trace(traces)))
        elapsed = time.perf_counter() - start
        outcomes[backend] = batch
        print(f"  {backend:>8}: {elapsed:6.2f} s total   {elapsed / runs * 1e3:7.1f} ms/run")
    if len(outcomes) == 2:
        same = outcomes["compiled"] == outcomes["python"]
        print(f"  backends produce identical results: {same}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--agents", type=int, default=10)
    parser.add_argument("--values", type=int, default=10)
    parser.add_argument("--reps", type=int, default=20000)
    parser.add_argument("--runs", type=int, default=30)
    args = parser.parse_args()

    print(f"available backends: {', '.join(kernels.available_backends())}")
    bench_kernels(args.agents, args.values, args.reps)
    bench_runs(args.agents, args.values, args.runs)


if __name__ == "__main__":
    main()
