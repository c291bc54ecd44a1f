# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled min-plus kernels.

Same contract as :mod:`infconv._kernels_py`; see that module for the index
conventions.  Arrays are padded to three axes by the caller.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


cdef inline double _row_min(const double* fp, const double* gp, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    # four accumulators for ILP; the min is exact so the order is irrelevant
    cdef double m0 = INFINITY, m1 = INFINITY, m2 = INFINITY, m3 = INFINITY
    cdef double v0, v1, v2, v3
    cdef Py_ssize_t j = lo
    while j + 4 <= hi:
        v0 = fp[j] + gp[j]
        v1 = fp[j + 1] + gp[j + 1]
        v2 = fp[j + 2] + gp[j + 2]
        v3 = fp[j + 3] + gp[j + 3]
        m0 = v0 if v0 < m0 else m0
        m1 = v1 if v1 < m1 else m1
        m2 = v2 if v2 < m2 else m2
        m3 = v3 if v3 < m3 else m3
        j += 4
    while j < hi:
        v0 = fp[j] + gp[j]
        m0 = v0 if v0 < m0 else m0
        j += 1
    m0 = m1 if m1 < m0 else m0
    m2 = m3 if m3 < m2 else m2
    return m2 if m2 < m0 else m0


cdef inline Py_ssize_t _row_first(const double* fp, const double* gp, Py_ssize_t lo, Py_ssize_t hi, double target) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(lo, hi):
        if fp[j] + gp[j] == target:
            return j
    return -1


def minplus3(const double[:, :, ::1] f, const double[:, :, ::1] gr, base, out_shape):
    """Brute-force min-plus product on 3-axis arrays.

    ``gr`` is the axis-reversed second operand; ``base[a]`` is the offset
    such that output index ``i`` pairs ``f[j]`` with ``gr[j + base - i]``.
    Returns ``(out, argmin)`` where ``argmin`` is the flat index into ``f``
    of the first minimiser in row-major order (-1 if infeasible).
    """
    cdef Py_ssize_t F0 = f.shape[0], F1 = f.shape[1], F2 = f.shape[2]
    cdef Py_ssize_t G0 = gr.shape[0], G1 = gr.shape[1], G2 = gr.shape[2]
    cdef Py_ssize_t b0 = base[0], b1 = base[1], b2 = base[2]
    cdef Py_ssize_t O0 = out_shape[0], O1 = out_shape[1], O2 = out_shape[2]
    out_arr = np.empty((O0, O1, O2), dtype=np.float64)
    arg_arr = np.empty((O0, O1, O2), dtype=np.int64)
    cdef double[:, :, ::1] out = out_arr
    cdef cnp.int64_t[:, :, ::1] arg = arg_arr
    cdef Py_ssize_t i0, i1, i2, j0, j1, lo0, hi0, lo1, hi1, lo2, hi2, jj
    cdef double best, rm
    cdef Py_ssize_t best_at
    cdef const double* fp
    cdef const double* gp
    with nogil:
        for i0 in range(O0):
            lo0 = i0 - b0 if i0 - b0 > 0 else 0
            hi0 = G0 + i0 - b0 if G0 + i0 - b0 < F0 else F0
            for i1 in range(O1):
                lo1 = i1 - b1 if i1 - b1 > 0 else 0
                hi1 = G1 + i1 - b1 if G1 + i1 - b1 < F1 else F1
                for i2 in range(O2):
                    lo2 = i2 - b2 if i2 - b2 > 0 else 0
                    hi2 = G2 + i2 - b2 if G2 + i2 - b2 < F2 else F2
                    best = INFINITY
                    best_at = -1
                    if lo2 < hi2:
                        for j0 in range(lo0, hi0):
                            for j1 in range(lo1, hi1):
                                fp = &f[j0, j1, 0]
                                # gp[j] addresses gr[j0 + b0 - i0, j1 + b1 - i1, j + b2 - i2]
                                gp = &gr[j0 + b0 - i0, j1 + b1 - i1, 0] + (b2 - i2)
                                rm = _row_min(fp, gp, lo2, hi2)
                                if rm < best:
                                    best = rm
                                    jj = _row_first(fp, gp, lo2, hi2, rm)
                                    best_at = (j0 * F1 + j1) * F2 + jj
                    out[i0, i1, i2] = best
                    arg[i0, i1, i2] = best_at
    return out_arr, arg_arr


def convex_merge(const double[::1] f, const double[::1] g):
    """Full min-plus product of two discretely convex sequences in O(n).

    Increments of the result are the sorted merge of both increment
    sequences; element ``t`` is ``f[j_t] + g[t - j_t]`` with ``j_t`` the
    number of ``f`` increments among the first ``t`` merged ones (ties take
    the ``f`` increment first).
    """
    cdef Py_ssize_t nf = f.shape[0], ng = g.shape[0]
    cdef Py_ssize_t t, j = 0, k = 0
    out_arr = np.empty(nf + ng - 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        out[0] = f[0] + g[0]
        for t in range(1, nf + ng - 1):
            if k >= ng - 1 or (j < nf - 1 and f[j + 1] - f[j] <= g[k + 1] - g[k]):
                j += 1
            else:
                k += 1
            out[t] = f[j] + g[k]
    return out_arr
