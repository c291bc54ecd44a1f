"""Compare the compiled and NumPy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times the brute-force pair in d = 1, 2 and the O(n) convex merge for every
available backend and prints one row per case.
"""

import argparse
import time

import numpy as np

from infconv import _backend
from infconv.engine import ConvexSequence, infconv_convex_fast_1d, infconv_pair
from infconv.grid import Gaussian, make_grid, sample


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def convex(grid, rng):
    inc = np.sort(rng.normal(0, 1, grid.n - 1))
    return ConvexSequence(grid, np.concatenate([[0.0], np.cumsum(inc)]))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = _backend.available()
    cases = []
    for d, n in ((1, 1025), (1, 4097), (2, 65), (2, 129)):
        grid = make_grid(d, 6, n)
        f = sample(Gaussian(), grid)
        cases.append((f"pair d={d} n={n}", lambda b, f=f: infconv_pair(f, f, backend=b)))
    for n in (4097, 65537):
        grid = make_grid(1, 1, n)
        f, g = convex(grid, rng), convex(grid, rng)
        cases.append((f"convex merge n={n}", lambda b, f=f, g=g: infconv_convex_fast_1d(f, g, backend=b)))

    print(f"{'case':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases:
        times = [best_of(lambda: fn(b), args.repeat) for b in backends]
        row = f"{name:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"{times[1] / times[0]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
