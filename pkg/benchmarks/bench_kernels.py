"""Compare the compiled and numpy diagonal-simplex kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

from remad import _kernels_py

try:
    from remad import _kernels
except ImportError:  # extension not built
    _kernels = None

POINTS = [(0.2, 0.1, 0.1), (0.1, 0.3, 0.05), (0.45, 0.2, 0.3)]


def bench(impl, resolution: int, repeat: int) -> float:
    def run():
        for g in POINTS:
            impl.simplex_grid_argmax(*g, resolution, 0)
            impl.simplex_grid_argmax(*g, resolution, 1)

    return min(timeit.repeat(run, number=1, repeat=repeat)) / (2 * len(POINTS))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'resolution':>10} {'numpy [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for res in (50, 100, 200, 400, 800):
        t_py = bench(_kernels_py, res, args.repeat)
        if _kernels is None:
            print(f"{res:>10} {1e3 * t_py:>12.3f} {'n/a':>12} {'n/a':>8}")
            continue
        t_c = bench(_kernels, res, args.repeat)
        # both backends must agree on the maximizer
        for g in POINTS:
            a = _kernels.simplex_grid_argmax(*g, res, 0)
            b = _kernels_py.simplex_grid_argmax(*g, res, 0)
            assert a[1:] == b[1:] and abs(a[0] - b[0]) < 1e-12, (g, a, b)
        print(f"{res:>10} {1e3 * t_py:>12.3f} {1e3 * t_c:>12.3f} {t_py / t_c:>8.1f}x")


if __name__ == "__main__":
    main()
