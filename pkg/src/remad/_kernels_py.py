"""Numpy fallback for the compiled diagonal-simplex kernels."""

from __future__ import annotations

import numpy as np


def _h(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = -x[pos] * np.log2(x[pos])
    return out


def _objective(g10, g21, g20, p1, p2, mode):
    g22 = max(1.0 - g21 - g20, 0.0)
    p0 = 1.0 - p1 - p2
    q = (p0 + g10 * p1 + g20 * p2, (1.0 - g10) * p1 + g21 * p2, g22 * p2)
    r = (p0 + (1.0 - g10) * p1 + g22 * p2, g10 * p1 + g21 * p2, g20 * p2)
    v = sum(_h(x) for x in q) - sum(_h(x) for x in r)
    if mode == 1:
        v = v + _h(p0) + _h(p1) + _h(p2)
    return v


def diag_objective(g10, g21, g20, p1, p2, mode=0):
    """Coherent (mode 0) or mutual (mode 1) information of a diagonal qutrit input."""
    return float(_objective(g10, g21, g20, np.asarray(p1), np.asarray(p2), mode))


def simplex_grid_argmax(g10, g21, g20, resolution, mode=0):
    """Same contract as the compiled kernel (lexicographic tie-break)."""
    n = int(resolution)
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = (i + j) <= n
    # row-major flattening of the ij grid is lexicographic in (p1, p2)
    p1, p2 = i[keep] / n, j[keep] / n
    v = _objective(g10, g21, g20, p1, p2, mode)
    k = int(np.argmax(v))
    return float(v[k]), float(p1[k]), float(p2[k]), int(v.size)
