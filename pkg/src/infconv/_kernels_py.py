"""Pure NumPy fallback for the compiled kernels in ``_kernels.pyx``.

Index convention shared by both backends: ``gr`` is the second operand
reversed along every axis, and output index ``i`` pairs ``f[j]`` with
``gr[j + base - i]`` (per axis).  Every candidate is a single float
addition and the minimum is exact, so both backends agree bitwise.
"""

import numpy as np


def minplus3(f, gr, base, out_shape):
    f = np.ascontiguousarray(f, dtype=np.float64)
    gr = np.ascontiguousarray(gr, dtype=np.float64)
    out = np.full(tuple(out_shape), np.inf)
    arg = np.full(tuple(out_shape), -1, dtype=np.int64)
    fshape, gshape = f.shape, gr.shape
    # iterate over the finite nodes of f in row-major order; strict "<" keeps
    # the first minimiser
    flat = np.flatnonzero(np.isfinite(f))
    for pos in flat:
        j = np.unravel_index(pos, fshape)
        # i with 0 <= j + base - i < G  <=>  j + base - G < i <= j + base
        out_sl, g_sl = [], []
        empty = False
        for a in range(3):
            lo = max(0, j[a] + base[a] - gshape[a] + 1)
            hi = min(out_shape[a], j[a] + base[a] + 1)
            if lo >= hi:
                empty = True
                break
            out_sl.append(slice(lo, hi))
            # gr index = j + base - i runs downwards as i runs upwards
            k_hi = j[a] + base[a] - lo
            k_lo = j[a] + base[a] - (hi - 1)
            g_sl.append(slice(k_lo, k_hi + 1))
        if empty:
            continue
        out_sl = tuple(out_sl)
        cand = f[j] + gr[tuple(g_sl)][::-1, ::-1, ::-1]
        view = out[out_sl]
        better = cand < view
        view[better] = cand[better]
        arg[out_sl][better] = pos
    return out, arg


def convex_merge(f, g):
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    inc = np.concatenate([np.diff(f), np.diff(g)])
    is_f = np.concatenate([np.ones(f.size - 1, dtype=np.int64), np.zeros(g.size - 1, dtype=np.int64)])
    # stable sort puts f increments before equal g increments
    order = np.argsort(inc, kind="stable")
    j = np.concatenate([[0], np.cumsum(is_f[order])])
    t = np.arange(f.size + g.size - 1)
    return f[j] + g[t - j]
