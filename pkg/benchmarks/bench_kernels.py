"""Timing comparison of the weighted-error kernels: numba JIT vs plain numpy.

The jitted loops avoid materializing the float64 difference and product
arrays that the numpy path allocates per call, which is where the win
comes from on large planes.

Run: python benchmarks/bench_kernels.py [--height 2160] [--width 4320] [--repeats 20]
Set QPA360_NO_NUMBA=1 to confirm the public API falls back cleanly.
"""

import argparse
import time

import numpy as np

from qpa360 import kernels
from qpa360.geometry import latitude_weights, sphere_weight_map


def time_fn(fn, args, repeats):
    fn(*args)  # warm up (includes JIT compilation for the numba path)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--height", type=int, default=2160)
    parser.add_argument("--width", type=int, default=4320)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    shape = (args.height, args.width)
    ref = rng.integers(0, 256, size=shape).astype(np.uint8)
    test = rng.integers(0, 256, size=shape).astype(np.uint8)
    grid = sphere_weight_map(*shape)
    row_w = latitude_weights(args.height)

    print(f"plane {args.width}x{args.height}, {args.repeats} repeats, best-of timing")
    print(f"active backend: {kernels.BACKEND}")
    print()

    cases = [
        ("sse", (ref, test)),
        ("weighted_sse", (ref, test, grid)),
        ("row_weighted_sse", (ref, test, row_w)),
    ]
    numpy_impls = {
        "sse": kernels._numpy_sse,
        "weighted_sse": kernels._numpy_weighted_sse,
        "row_weighted_sse": kernels._numpy_row_weighted_sse,
    }

    print(f"{'kernel':<18} {'numpy':>10} {'active':>10} {'speedup':>8}")
    for name, call_args in cases:
        plain = time_fn(numpy_impls[name], call_args, args.repeats)
        active = time_fn(getattr(kernels, name), call_args, args.repeats)
        a = numpy_impls[name](*call_args)
        b = getattr(kernels, name)(*call_args)
        assert abs(a - b) <= 1e-9 * abs(a), f"{name}: backends disagree ({a} vs {b})"
        print(f"{name:<18} {plain * 1e3:>8.2f}ms {active * 1e3:>8.2f}ms {plain / active:>7.2f}x")


if __name__ == "__main__":
    main()
