#!/usr/bin/env python3
"""Benchmark the numba and numpy execution backends against each other.

Times the two hot kernels: the scalar distance-diffusion integrator and
the full landmark Brownian-motion integrator.  The numba backend is
warmed up first so JIT compilation is excluded from the timings.

Usage: python benchmarks/bench_backends.py [--paths N] [--steps N]
"""

import argparse
import time

import numpy as np

from landmarkbm import LandmarkConfig, make_gaussian, make_matern
from landmarkbm.distance_sde import DistanceCoefficients, simulate_distance
from landmarkbm.simulator import simulate


def _time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_distance(paths, steps):
    coeffs = DistanceCoefficients(make_matern(0.5), 1)
    rows = []
    for backend in ("numba", "numpy"):
        simulate_distance(coeffs, 1.0, 0.01, 50, 0, 2, backend=backend)  # warmup
        dt = _time(lambda: simulate_distance(
            coeffs, 1.0, 1.0, steps, 7, paths, absorb_eps=1e-4, backend=backend))
        rows.append((backend, dt))
    return rows


def bench_landmarks(paths, steps, d=2):
    kernel = make_gaussian()
    pts = np.zeros((2, d))
    pts[1, 0] = 1.0
    cfg = LandmarkConfig(pts)
    rows = []
    for backend in ("numba", "numpy"):
        simulate(kernel, cfg, 0.01, 20, 2, 0, backend=backend)  # warmup
        dt = _time(lambda: simulate(
            kernel, cfg, 1.0, steps, paths, 7, backend=backend))
        rows.append((backend, dt))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=200)
    parser.add_argument("--steps", type=int, default=10_000)
    args = parser.parse_args()

    print(f"distance diffusion: {args.paths} paths x {args.steps} steps")
    dist = bench_distance(args.paths, args.steps)
    for backend, dt in dist:
        rate = args.paths * args.steps / dt / 1e6
        print(f"  {backend:6s} {dt:8.3f} s   {rate:7.1f} M steps/s")
    print(f"  speedup numba/numpy: {dist[1][1] / dist[0][1]:.1f}x")

    lsteps = max(args.steps // 10, 100)
    print(f"landmark Brownian motion (n=2, d=2): {args.paths} paths x {lsteps} steps")
    land = bench_landmarks(args.paths, lsteps)
    for backend, dt in land:
        rate = args.paths * lsteps / dt / 1e3
        print(f"  {backend:6s} {dt:8.3f} s   {rate:7.1f} k steps/s")
    print(f"  speedup numba/numpy: {land[1][1] / land[0][1]:.1f}x")


if __name__ == "__main__":
    main()
