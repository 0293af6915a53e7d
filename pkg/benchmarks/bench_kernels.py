"""Timing comparison of the compiled and pure-numpy kernel backends.

Runs the three kernel primitives (potential, gradient, curl) on problem
sizes representative of off-surface field evaluation and the volume
current reconstruction, and reports wall time plus agreement between the
backends.

Usage: python benchmarks/bench_kernels.py [--sizes N_TARGETS:N_SOURCES ...]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from londebye._kernels import BACKEND, numpy_backend

try:
    from londebye._kernels import cython_backend
except ImportError:
    cython_backend = None


def _time(func, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(n_targets: int, n_sources: int, kappa: float = 1.0, seed: int = 0):
    rng = np.random.default_rng(seed)
    targets = rng.normal(size=(n_targets, 3)) + 3.0  # separated from sources
    sources = rng.normal(size=(n_sources, 3)) * 0.3
    charge = rng.normal(size=n_sources)
    vec = rng.normal(size=(n_sources, 3))

    print(f"\n{n_targets} targets x {n_sources} sources (kappa={kappa}):")
    print(f"{'kernel':>10s} {'cython [s]':>12s} {'numpy [s]':>12s} "
          f"{'speedup':>8s} {'max |diff|':>12s}")
    for name, args in (
        ("potential", (targets, sources, charge, kappa)),
        ("gradient", (targets, sources, charge, kappa)),
        ("curl", (targets, sources, vec, kappa)),
    ):
        t_cy, out_cy = _time(getattr(cython_backend, name), *args)
        t_np, out_np = _time(getattr(numpy_backend, name), *args)
        diff = float(np.max(np.abs(out_cy - out_np)))
        scale = float(np.max(np.abs(out_np))) or 1.0
        print(f"{name:>10s} {t_cy:12.4f} {t_np:12.4f} "
              f"{t_np / t_cy:8.2f} {diff / scale:12.3e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n", 1)[0])
    parser.add_argument(
        "--sizes",
        nargs="*",
        default=["1000:10000", "100:100000", "30:790000"],
        help="problem sizes as N_TARGETS:N_SOURCES",
    )
    args = parser.parse_args()
    print(f"active backend: {BACKEND}")
    if cython_backend is None:
        parser.exit(1, "compiled backend unavailable; nothing to compare\n")
    for spec in args.sizes:
        nt, ns = (int(s) for s in spec.split(":"))
        run(nt, ns)


if __name__ == "__main__":
    main()
