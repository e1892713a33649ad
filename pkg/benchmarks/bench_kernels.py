"""Compiled vs numpy pair-loop kernels on grid-oracle sized inputs.

    python benchmarks/bench_kernels.py [--sizes 400 1600 6400] [--repeat 3]

Both backends get identical inputs; the script checks the outputs agree and
prints the median wall time of each.
"""

import argparse
import math
import statistics
import time

import numpy as np

from suplift import _kernels_py

try:
    from suplift import _kernels as _compiled
except ImportError:
    _compiled = None


def affine_inputs(k: int, seed: int = 0):
    """``k`` nonzero nodes per input on a 2D grid, t = 1/2 (coefficients 1, 1)."""
    rng = np.random.default_rng(seed)
    side = int(math.isqrt(k)) + 1
    fidx = rng.integers(0, side, (k, 2)).astype(np.int64)
    gidx = rng.integers(0, side, (k, 2)).astype(np.int64)
    fvals, gvals = rng.uniform(0.1, 2.0, k), rng.uniform(0.1, 2.0, k)
    shape = np.array([2 * side, 2 * side], dtype=np.int64)
    return (fvals, fidx, gvals, gidx, 1, 1, np.zeros(2, dtype=np.int64), shape, 0.0, 0.5, 0.5)


def heisenberg_inputs(k: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    fx = np.ascontiguousarray(rng.uniform(-1, 1, (k, 3)))
    gy = np.ascontiguousarray(rng.uniform(-1, 1, (k, 3)))
    fvals, gvals = rng.uniform(0.1, 2.0, k), rng.uniform(0.1, 2.0, k)
    side = 24
    h = np.full(3, 5.0 / side)
    lo = np.full(3, -2.5)
    return (fvals, fx, gvals, gy, lo, h, np.array([side] * 3, dtype=np.int64), -1.0 / 3.0, 0.5, 0.5)


def timed(fn, args, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), np.asarray(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[400, 1600, 6400])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; only the numpy backend is timed")
    print(f"{'kernel':<12} {'k':>6} {'pairs':>12} {'numpy s':>10} {'cython s':>10} {'speedup':>8}")
    for name, make in (("affine", affine_inputs), ("heisenberg", heisenberg_inputs)):
        for k in args.sizes:
            inputs = make(k)
            t_np, out_np = timed(getattr(_kernels_py, f"{name}_pair_max"), inputs, args.repeat)
            if _compiled is not None:
                t_cy, out_cy = timed(getattr(_compiled, f"{name}_pair_max"), inputs, args.repeat)
                if not np.allclose(out_np, out_cy, rtol=1e-12, atol=0.0):
                    raise SystemExit(f"{name} k={k}: backends disagree")
                print(f"{name:<12} {k:>6} {k * k:>12} {t_np:>10.4f} {t_cy:>10.4f} {t_np / t_cy:>7.1f}x")
            else:
                print(f"{name:<12} {k:>6} {k * k:>12} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
