"""Time the contour kernel: numba loop against the vectorised numpy version.

    python3 benchmarks/bench_contour.py [edges] [repeats]
"""

import sys
import time

import numpy as np

from quadmaps import kernels
from quadmaps.sampler import _uniform_forest_word, make_rng


def main():
    edges = int(sys.argv[1]) if len(sys.argv) > 1 else 1 << 20
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    rng = make_rng(0)
    trees = max(2, int(np.sqrt(edges)))
    word = _uniform_forest_word(rng, trees, edges)
    inc = rng.integers(-1, 2, size=len(word))
    corners = rng.integers(-50, 50, size=trees)

    impls = [("numpy", kernels.contour_numpy)]
    if kernels.USE_NUMBA:
        impls.append(("numba", kernels.contour))
        kernels.contour(word[:10], inc[:10], corners)  # compile outside the timing

    ref = None
    for name, fn in impls:
        best = float("inf")
        for _ in range(repeats):
            t = time.perf_counter()
            out = fn(word, inc, corners)
            best = min(best, time.perf_counter() - t)
        if ref is None:
            ref = out
        else:
            assert all(np.array_equal(a, b) for a, b in zip(ref, out))
        print(f"{name:6s} {len(word):>9d} steps  best {best * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
