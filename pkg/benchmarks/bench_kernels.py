"""Benchmark the numba kernels against the pure-numpy fallback.

Runs every elementwise kernel on training-shaped batches with both
backends in one process and reports the speedup.  The matrix products
of a layer are identical in both backends (numpy BLAS), so this
isolates exactly the part the compiled kernels are responsible for.

Usage:
    python benchmarks/bench_kernels.py [--batch 500] [--width 420] [--repeats 30]
"""

import argparse
import time

import numpy as np

from complexae import kernels


def best_of(fn, args, repeats):
    fn(*args)  # compile / warm caches
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=500)
    ap.add_argument("--width", type=int, default=420)
    ap.add_argument("--repeats", type=int, default=30)
    args = ap.parse_args()

    try:
        kn = kernels.get_kernels(True)
    except ImportError:
        raise SystemExit("numba is not installed; nothing to compare")
    kp = kernels.get_kernels(False)

    rng = np.random.Generator(np.random.PCG64(0))
    shape = (args.batch, args.width)
    z = rng.uniform(-2, 2, shape) + 1j * rng.uniform(-2, 2, shape)
    x = rng.uniform(-2, 2, shape) + 1j * rng.uniform(-2, 2, shape)
    da = rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)
    das = rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)
    fz = rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)
    fzs = rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)

    cases = [
        ("atan_forward", (z,)),
        ("atan_val_deriv", (z,)),
        ("split_atan_forward", (z,)),
        ("split_atan_val_deriv", (z,)),
        ("chain_full", (da, das, fz, fzs)),
        ("chain_holo", (da, das, fz)),
        ("mse_terms", (z, x)),
        ("nmse_terms", (z, x, 0.1)),
        ("pa_terms", (z, x, 2.0, 0.1, 1e-12)),
    ]

    print(f"batch {args.batch} x width {args.width}, best of {args.repeats}")
    print(f"{'kernel':<22} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, call_args in cases:
        t_np = best_of(getattr(kp, name), call_args, args.repeats)
        t_nb = best_of(getattr(kn, name), call_args, args.repeats)
        print(f"{name:<22} {t_np * 1e3:>9.3f}ms {t_nb * 1e3:>9.3f}ms "
              f"{t_np / t_nb:>7.2f}x")
    print("\nfull training epochs run the same BLAS matmuls either way; "
          "set COMPLEXAE_BACKEND to time end to end.")


if __name__ == "__main__":
    main()
