# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled diagonal-simplex kernels for qutrit ReMAD channels."""

from libc.math cimport log2

cdef inline double _h(double x) nogil:
    return -x * log2(x) if x > 0.0 else 0.0


cdef inline double _objective(double g10, double g21, double g20, double g22,
                              double p0, double p1, double p2, int mode) nogil:
    cdef double q0 = p0 + g10 * p1 + g20 * p2
    cdef double q1 = (1.0 - g10) * p1 + g21 * p2
    cdef double q2 = g22 * p2
    cdef double r0 = p0 + (1.0 - g10) * p1 + g22 * p2
    cdef double r1 = g10 * p1 + g21 * p2
    cdef double r2 = g20 * p2
    cdef double v = _h(q0) + _h(q1) + _h(q2) - _h(r0) - _h(r1) - _h(r2)
    if mode == 1:
        v += _h(p0) + _h(p1) + _h(p2)
    return v


def diag_objective(double g10, double g21, double g20, double p1, double p2, int mode=0):
    """Coherent (mode 0) or mutual (mode 1) information of a diagonal qutrit input."""
    cdef double g22 = 1.0 - g21 - g20
    if g22 < 0.0:
        g22 = 0.0
    return _objective(g10, g21, g20, g22, 1.0 - p1 - p2, p1, p2, mode)


def simplex_grid_argmax(double g10, double g21, double g20, int resolution, int mode=0):
    """Maximize over ``p = (1 - i/n - j/n, i/n, j/n)``, ``i + j <= n``.

    Ties keep the lexicographically smallest ``(p1, p2)``.  Returns
    ``(value, p1, p2, evaluations)``.
    """
    cdef double g22 = 1.0 - g21 - g20
    cdef double best = -1e300
    cdef double v, p1, p2
    cdef int i, j, bi = 0, bj = 0
    cdef long evals = 0
    cdef double n = resolution
    if g22 < 0.0:
        g22 = 0.0
    with nogil:
        for i in range(resolution + 1):
            p1 = i / n
            for j in range(resolution + 1 - i):
                p2 = j / n
                v = _objective(g10, g21, g20, g22, 1.0 - p1 - p2, p1, p2, mode)
                evals += 1
                if v > best:
                    best = v
                    bi = i
                    bj = j
    return best, bi / n, bj / n, evals
