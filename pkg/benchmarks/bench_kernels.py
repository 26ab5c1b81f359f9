"""Time the compiled kernels against the numpy fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit

import numpy as np

from hilbsam import _kernels_py

try:
    from hilbsam import _kernels as compiled
except ImportError:
    compiled = None


def cases():
    rng = random.Random(0)
    k, n = 4, 24
    gens = np.array([[rng.randint(0, 4) for _ in range(k)] for _ in range(8)], dtype=np.int64)
    yield "count_standard (4 vars, degree 24)", "count_standard", (gens, k, n)

    k, n = 3, 60
    pts = np.array([[rng.randint(-12, 4) for _ in range(k)] for _ in range(7)], dtype=np.int64)
    mask = np.zeros_like(pts, dtype=np.uint8)
    mask[0, 0] = 1
    yield "polytope_slice_sum (P^2, degree 60)", "polytope_slice_sum", (pts, mask, k, n)

    # a superadditive profile on N^2 up to degree 40: no early exit
    idx = [(a, d - a) for d in range(41) for a in range(d, -1, -1)]
    width = 82
    offsets = np.array([a * width + b for a, b in idx], dtype=np.int64)
    degrees = np.array([a + b for a, b in idx], dtype=np.int64)
    dense = np.zeros(width * width, dtype=np.int64)
    for a in range(width):
        for b in range(width):
            dense[a * width + b] = min(3 * a - b, 2 * b - a)
    yield "superadditive_scan (N^2, degree 40)", "superadditive_scan", (offsets, degrees, dense, 40)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'kernel':40s} {'python (ms)':>12s} {'compiled (ms)':>14s} {'speedup':>8s}")
    for label, name, inputs in cases():
        py = min(timeit.repeat(lambda: getattr(_kernels_py, name)(*inputs), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{label:40s} {py * 1e3:12.2f} {'-':>14s} {'-':>8s}")
            continue
        assert getattr(compiled, name)(*inputs) == getattr(_kernels_py, name)(*inputs)
        cy = min(timeit.repeat(lambda: getattr(compiled, name)(*inputs), number=1, repeat=args.repeat))
        print(f"{label:40s} {py * 1e3:12.2f} {cy * 1e3:14.2f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
