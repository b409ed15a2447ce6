"""Time the compiled kernels against the numpy fallback.

    python3 bench/benchmark.py [--size N] [--repeat R]

Both backends get identical inputs; the script also checks that their
outputs agree before reporting timings.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from shortcode import kernels
from shortcode.gf2 import Prng
from shortcode.graphs import GrassmannGraph


def workloads(size: int):
    p = Prng(0)
    out = {}
    tab = GrassmannGraph(2, 5).tables()
    values = p.integers(0, 4, tab.size)
    out["grassmann_walk G(2,5)"] = (
        "grassmann_walk",
        (tab.keys, tab.bases, tab.pivots, tab.frees, values, 5, 2,
         p.integers(0, tab.size, size), p.integers(0, tab.degree, size)),
    )
    table = p.integers(0, 4, 1 << 6)
    out["shortcode_accepts S_(2,3)"] = (
        "shortcode_accepts",
        (table, p.integers(0, 64, size), p.integers(0, 4, size), p.integers(0, 8, size), 2, 3),
    )
    ttable = p.integers(0, 4, 256)
    out["tensor_accepts Ten_(2,2,2)"] = (
        "tensor_accepts",
        (ttable, p.integers(0, 256, size), p.integers(1, 4, size), p.integers(0, 4, size),
         p.integers(0, 4, size), 2, 2, 2),
    )
    return out


def _same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(_same(a, b) for a, b in zip(x, y))
    return np.array_equal(np.asarray(x).astype(np.int64), np.asarray(y).astype(np.int64))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1 << 16, help="batch size per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    py = kernels.load_backend("python")
    try:
        cy = kernels.load_backend("cython")
    except ImportError:
        cy = None
        print("compiled extension not built; timing the numpy fallback only")

    print(f"{'kernel':30s} {'numpy (ms)':>12s} {'cython (ms)':>12s} {'speedup':>8s}")
    for name, (fn, call_args) in workloads(args.size).items():
        t_py = min(timeit.repeat(lambda: getattr(py, fn)(*call_args), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:30s} {t_py:12.2f} {'-':>12s} {'-':>8s}")
            continue
        if not _same(getattr(py, fn)(*call_args), getattr(cy, fn)(*call_args)):
            raise SystemExit(f"backends disagree on {name}")
        t_cy = min(timeit.repeat(lambda: getattr(cy, fn)(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:30s} {t_py:12.2f} {t_cy:12.2f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
