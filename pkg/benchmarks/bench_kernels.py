"""Time the numba kernels against their numpy fallbacks.

Both paths run in one process by flipping FFDESCENT_NUMBA between calls; the
numba compile happens in a warm-up pass that is not timed.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np

from ffdescent import _kernels
from ffdescent.group_ring import GroupRing
from ffdescent.modules import IndexSet
from ffdescent.rings import ProductFp


def _cases(rng):
    p = 3
    A = rng.integers(0, p, size=(160, 200), dtype=np.int64)
    gr = GroupRing(ProductFp(2, 1), [IndexSet(range(4)), IndexSet(range(4))])
    R = gr.structure_ring
    idx, coef = R.idx, R.coef
    X = rng.integers(0, 2, size=(64, R.dim), dtype=np.int64)
    Y = rng.integers(0, 2, size=(64, R.dim), dtype=np.int64)
    hits = rng.random((3, 200_000)) < 0.7
    hits[:, -1] = False
    return {
        "rref 160x200 mod 3": lambda: _kernels.rref_inplace(A.copy(), p),
        f"mono_mul_rows 64 x dim {R.dim}": lambda: _kernels.mono_mul_rows(X, Y, idx, coef, 2),
        f"mult_matrix dim {R.dim}": lambda: _kernels.mult_matrix(X[0], idx, coef, 2),
        "first_uncovered 3x200000": lambda: _kernels.first_uncovered(hits),
    }


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    cases = _cases(np.random.default_rng(args.seed))
    saved = os.environ.get("FFDESCENT_NUMBA")
    results = {}
    try:
        for flag in ("1", "0"):
            os.environ["FFDESCENT_NUMBA"] = flag
            for name, fn in cases.items():
                fn()  # warm-up, includes compilation on the numba path
                results[name, flag] = _best(fn, args.repeat)
    finally:
        if saved is None:
            os.environ.pop("FFDESCENT_NUMBA", None)
        else:
            os.environ["FFDESCENT_NUMBA"] = saved
    print(f"numba available: {_kernels.HAVE_NUMBA}")
    print(f"{'kernel':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name in cases:
        nb, npy = results[name, "1"], results[name, "0"]
        print(f"{name:32s} {nb * 1e3:10.3f} {npy * 1e3:10.3f} {npy / nb:8.1f}x")


if __name__ == "__main__":
    main()
