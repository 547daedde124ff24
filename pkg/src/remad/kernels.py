"""Kernel selection: compiled extension when available, numpy otherwise.

Set ``REMAD_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("REMAD_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

diag_objective = _impl.diag_objective
simplex_grid_argmax = _impl.simplex_grid_argmax

__all__ = ["BACKEND", "diag_objective", "simplex_grid_argmax"]
