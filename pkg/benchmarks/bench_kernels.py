"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--samples 1000000]

JIT compilation is excluded: each jit kernel is called once before timing.
"""

import argparse
import timeit

import numpy as np

from tasteleak import kernels
from tasteleak._accel import JIT_ENABLED


def workloads(samples: int, rng: np.random.Generator) -> dict:
    cdf = np.cumsum(rng.random((4, 216)), axis=1)
    cdf /= cdf[:, -1:]
    mass = rng.random((4, 216))
    kernel = rng.random(6201)  # sigma=5 reach
    return {
        "scatter_joint": (rng.integers(0, 4, samples), rng.integers(0, 216, samples), rng.random(samples), 4, 216),
        "smear": (mass, np.sort(rng.integers(0, 1800, 216)), kernel, 1800 + kernel.size),
        "count_cells": (rng.integers(0, 4, samples), rng.integers(0, 5000, samples), 4, 5000),
        "categorical_draws": (rng.random(samples), rng.integers(0, 4, samples), cdf),
    }


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=1_000_000)
    args = ap.parse_args()
    if not JIT_ENABLED:
        print("numba disabled or missing; both columns time the numpy path")
    rng = np.random.default_rng(0)
    print(f"{'kernel':20s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, raw in workloads(args.samples, rng).items():
        call_args = [np.ascontiguousarray(a, dtype=np.int64 if a.dtype.kind == "i" else np.float64)
                     if isinstance(a, np.ndarray) else a for a in raw]
        jit_fn, np_fn = kernels.IMPLEMENTATIONS[name]
        if not JIT_ENABLED:
            jit_fn = np_fn
        np.testing.assert_allclose(jit_fn(*call_args), np_fn(*call_args), rtol=1e-12, atol=1e-12)
        t_jit = min(timeit.repeat(lambda: jit_fn(*call_args), number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(lambda: np_fn(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:20s} {t_jit:10.2f} {t_np:10.2f} {t_np / t_jit:7.1f}x")


if __name__ == "__main__":
    main()
