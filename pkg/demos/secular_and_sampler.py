#!/usr/bin/env python3
"""The broken-arrow singular value solver and the recursive sampler.

1. Solve a few random broken-arrow matrices and compare with dense SVD.
2. Show the per-draw workspace of the sampler growing linearly in n.
3. Compare the recursive sampler at D = I with the bidiagonal Laguerre model.
"""

import sys
import time

import numpy as np

from betawishart import (
    BrokenArrowMatrix,
    RngStream,
    WishartParams,
    WorkspaceTrace,
    broken_arrow_svd,
    laguerre_bidiagonal_sample,
    sample_eigenvalues,
    sample_singular_values,
)


def main():
    g = np.random.default_rng(1)
    print("broken-arrow solver vs numpy.linalg.svd")
    for n in (3, 10, 40):
        b = g.uniform(0.1, 5, n - 1)
        a = g.standard_normal(n)
        a[-1] = abs(a[-1])
        B = BrokenArrowMatrix(b, a)
        f = broken_arrow_svd(B)
        ref = np.linalg.svd(B.to_dense(), compute_uv=False)
        print(f"  n={n:3d} max rel err {np.max(np.abs(f.values - ref) / ref):.1e}"
              f"  ||q||-1 = {np.linalg.norm(f.q) - 1:+.1e}")

    print("sampler workspace (floats per draw)")
    for n in (10, 50, 100):
        tr = WorkspaceTrace()
        t0 = time.perf_counter()
        sample_singular_values(RngStream(0), WishartParams(n + 10, n, 1.5), size=100, trace=tr)
        print(f"  n={n:4d} peak {tr.peak_floats_per_draw:5d}  ({time.perf_counter() - t0:.2f}s / 100 draws)")

    print("D = I: recursive sampler vs bidiagonal model, mean of tr(W^k)/n")
    rec = sample_eigenvalues(RngStream(2), WishartParams(6, 4, 2.5), size=50000)
    lag = laguerre_bidiagonal_sample(RngStream(3), 6, 4, 2.5, size=50000)
    for k in range(1, 5):
        print(f"  k={k}  {(rec ** k).mean():12.3f}  {(lag ** k).mean():12.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
