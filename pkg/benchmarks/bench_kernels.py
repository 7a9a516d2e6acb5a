"""Time each hot kernel on its numba and numpy paths.

    python benchmarks/bench_kernels.py [--repeat 5]

The jitted variants are warmed up once before timing so compilation is not
counted.  Results for both paths are also compared for agreement.
"""
import argparse
import time

import numpy as np

from gengsp import _kernels as K


def cases(rng):
    xs = rng.uniform(0, 2 * np.pi, 4000)
    freqs = np.arange(-64, 64) + 0.5
    cx = rng.uniform(-1, 1, 4000)
    phi = rng.normal(size=(4000, 16)) + 0j
    xi = rng.normal(size=(4000, 32)) + 1j * rng.normal(size=(4000, 32))
    nodes = rng.integers(0, 500, 20000).astype(np.int64)
    starts = rng.uniform(0, 10, 20000)
    ends = starts + rng.uniform(0, 2, 20000)
    wf = 2 * np.pi * np.arange(-64, 65) / 10.0
    times = np.linspace(0, 10, 256, endpoint=False)
    return {
        "exp_eval": (xs, freqs, np.sqrt(2 * np.pi)),
        "cheb_eval": (cx, 64),
        "design_matrix": (phi, xi),
        "step_coeffs": (nodes, starts, ends, wf, 500, np.sqrt(10.0)),
        "slot_status": (nodes, starts, ends, times, 500),
    }


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"numba available: {K.HAVE_NUMBA}  (public backend: {K.BACKEND})")
    if not K.HAVE_NUMBA:
        print("numba disabled; the *_jit kernels would run as pure Python loops, skipping")
        return
    print(f"{'kernel':<15}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}{'max |diff|':>12}")
    for name, a in cases(rng).items():
        np_fn = getattr(K, name + "_np")
        jit_fn = getattr(K, name + "_jit")
        diff = np.abs(np.asarray(np_fn(*a)) - np.asarray(jit_fn(*a))).max()  # also warms up
        t_np = best_of(np_fn, a, args.repeat)
        t_jit = best_of(jit_fn, a, args.repeat)
        print(f"{name:<15}{1e3 * t_np:>12.2f}{1e3 * t_jit:>12.2f}{t_np / t_jit:>9.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
