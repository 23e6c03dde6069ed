#!/usr/bin/env python3
"""Compare the numba and pure-numpy transport backends on a fixed workload.

Usage: python benchmarks/bench_transport.py [repeats]

The workload is the full standard loop family for a five-dimensional
metric, repeated a few times.  The numba backend is warmed up before
timing so compilation cost is excluded.
"""

import os
import sys
import time
from fractions import Fraction

from holonomy import build_B, build_canonical, lower_B, make_pencil
from holonomy.probe import FloatMetric, parallel_transport, standard_loops
from holonomy.probe import kernels


def run_backend(name, fm, loops):
    os.environ["HOLONOMY_BACKEND"] = name
    parallel_transport(fm, loops[0])  # warm-up / JIT compile
    started = time.perf_counter()
    for loop in loops:
        parallel_transport(fm, loop)
    return time.perf_counter() - started


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    pair = build_canonical(make_pencil([(Fraction(0), [(2, 1), (3, 1)])]))
    fm = FloatMetric.from_exact(lower_B(build_B(pair), pair.g))
    loops = standard_loops(pair.n, seed=0) * repeats

    previous = os.environ.get("HOLONOMY_BACKEND")
    results = {}
    try:
        for backend in ("numba", "numpy"):
            if backend == "numba" and not kernels.HAVE_NUMBA:
                print("numba not importable; skipping")
                continue
            results[backend] = run_backend(backend, fm, loops)
    finally:
        if previous is None:
            os.environ.pop("HOLONOMY_BACKEND", None)
        else:
            os.environ["HOLONOMY_BACKEND"] = previous

    print(f"{len(loops)} loop transports, dimension {pair.n}")
    for backend, dt in results.items():
        print(f"  {backend:6s} {dt:8.3f}s  ({len(loops) / dt:8.1f} loops/s)")
    if len(results) == 2:
        print(f"  speedup: {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
