"""Discrete infimal (min-plus) convolution on truncated grids.

Functions are +inf outside their box.  The pairwise operation returns the
result on the common input grid; the m-fold operation keeps intermediate
results on enlarged grids (same spacing) so that it is the exact min-plus
convolution of the box-truncated inputs, cropped only at the end.  That
makes the fold associative and equal to the exhaustive m-tuple oracle.

Engines
-------
``"brute"``
    Reference O(N_out * N) scan (compiled when available).
``"separable"``
    For sum-separable catalog specs, per-axis 1-D folds added together.
The convex O(n) merge path is a separate entry point,
:func:`infconv_convex_fast_1d`; nothing switches engines implicitly.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence

import numpy as np

from . import _backend
from .errors import EmptyFold, GridMismatch, NotConvex, OracleTooLarge
from .grid import FunctionSpec, GridFunction, GridSpec, sample

__all__ = [
    "ConvexSequence",
    "infconv_pair",
    "infconv_fold",
    "infconv_direct",
    "infconv_convex_fast_1d",
    "infconv_separable",
    "fold_specs",
    "symmetric_surrogate",
    "minplus_on",
    "DIRECT_COST_LIMIT",
]

#: Bound on ``d * (m - 1) * log2(n)`` for the exhaustive oracle.
DIRECT_COST_LIMIT = 40.0


def _pad3(arr: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(arr.reshape(arr.shape + (1,) * (3 - arr.ndim)), dtype=np.float64)


def minplus_on(f_vals: np.ndarray, f_grid: GridSpec, g_vals: np.ndarray, g_grid: GridSpec,
               out_grid: GridSpec, backend: str | None = None, return_argmin: bool = False):
    """Min-plus product of raw sample arrays on same-spacing origin-centred grids.

    Returns the raw output array on ``out_grid`` (no validation), and the
    argmin array (flat index into ``f_vals``, -1 when infeasible) when
    requested.
    """
    if not (f_grid.compatible(g_grid) and f_grid.compatible(out_grid)):
        raise GridMismatch(f"grids do not share dimension and spacing: {f_grid}, {g_grid}, {out_grid}")
    d = f_grid.d
    base = [g_grid.n - 1 + out_grid.center - f_grid.center - g_grid.center] * d + [0] * (3 - d)
    out_shape = list(out_grid.shape) + [1] * (3 - d)
    gr = _pad3(np.asarray(g_vals)[(slice(None, None, -1),) * d])
    kern = _backend.get(backend)
    out, arg = kern.minplus3(_pad3(np.asarray(f_vals)), gr, base, out_shape)
    out = out.reshape(out_grid.shape)
    if return_argmin:
        return out, arg.reshape(out_grid.shape)
    return out


def _check_same_grid(fs: Sequence[GridFunction]) -> GridSpec:
    grid = fs[0].grid
    for other in fs[1:]:
        if other.grid != grid:
            raise GridMismatch(f"{other.grid} differs from {grid}")
    return grid


def infconv_pair(f: GridFunction, g: GridFunction, backend: str | None = None,
                 return_argmin: bool = False):
    """``h[x] = min_y f[y] + g[x - y]`` over nodes ``y`` with both ``y`` and ``x - y`` in the box.

    With ``return_argmin`` also returns, per output node, the flat index of
    the first minimising ``y`` in row-major order (-1 where no pair is
    feasible or all candidates are +inf).
    """
    grid = _check_same_grid([f, g])
    res = minplus_on(f.values, grid, g.values, grid, grid, backend=backend, return_argmin=return_argmin)
    if return_argmin:
        out, arg = res
        arg = np.where(np.isfinite(out), arg, -1)
        return GridFunction(grid, out), arg
    return GridFunction(grid, res)


def infconv_fold(fs: Sequence[GridFunction], backend: str | None = None) -> GridFunction:
    """Left fold ``((f1 □ f2) □ f3) … □ fm`` evaluated on the common grid.

    Intermediate results live on the enlarged grid ``[-eL, eL]^d`` with
    ``e = min(k, m - k + 1)`` after step ``k``, which is exactly the part of
    the Minkowski range that can still reach the final box.
    """
    fs = list(fs)
    if not fs:
        raise EmptyFold("cannot fold an empty list")
    grid = _check_same_grid(fs)
    m = len(fs)
    if m == 1:
        return fs[0]
    acc, acc_grid = fs[0].values, grid
    for k in range(2, m + 1):
        out_grid = grid.extended(min(k, m - k + 1))
        acc = minplus_on(acc, acc_grid, fs[k - 1].values, grid, out_grid, backend=backend)
        acc_grid = out_grid
    return GridFunction(grid, acc)


def infconv_direct(fs: Sequence[GridFunction]) -> GridFunction:
    """Exhaustive oracle ``min { sum_j f_j[y_j] : sum_j y_j = x }`` over node tuples.

    Enumerates every tuple explicitly, without any pairwise structure.
    Exponential in ``m``; guarded by ``d (m-1) log2(n) <= 40``.
    """
    fs = list(fs)
    if len(fs) < 2:
        raise EmptyFold("the direct oracle needs at least two functions")
    grid = _check_same_grid(fs)
    m, d, n, c = len(fs), grid.d, grid.n, grid.center
    cost = d * (m - 1) * math.log2(n)
    if cost > DIRECT_COST_LIMIT:
        raise OracleTooLarge(f"d*(m-1)*log2(n) = {cost:.1f} exceeds {DIRECT_COST_LIMIT}")

    offsets = np.argwhere(np.ones(grid.shape, dtype=bool)) - c  # (N, d) integer coordinates / h
    N = offsets.shape[0]
    flat = [f.samples for f in fs]
    finite = [np.flatnonzero(np.isfinite(v)) for v in flat]

    out = np.full(N, np.inf)
    chunk = max(1, (1 << 22) // N)
    for prefix in itertools.product(*finite[: m - 2]):
        # partial sums accumulate left to right: ((f1 + f2) + ...) + fm
        pval = 0.0
        psum = np.zeros(d, dtype=np.int64)
        for j, idx in enumerate(prefix):
            pval = flat[j][idx] if j == 0 else pval + flat[j][idx]
            psum = psum + offsets[idx]
        ylast = finite[m - 2]
        for start in range(0, N, chunk):
            xs = offsets[start:start + chunk]                        # (B, d)
            ym = xs[:, None, :] - psum - offsets[ylast][None, :, :]  # (B, K, d)
            ok = np.all(np.abs(ym) <= c, axis=-1)
            ym_idx = np.ravel_multi_index(tuple(np.moveaxis(np.where(ok[..., None], ym, 0) + c, -1, 0)),
                                          grid.shape)
            first = flat[m - 2][ylast][None, :]
            partial = first if m == 2 else pval + first
            total = partial + flat[m - 1][ym_idx]
            total = np.where(ok, total, np.inf)
            out[start:start + chunk] = np.minimum(out[start:start + chunk], total.min(axis=1))
    return GridFunction(grid, out)


class ConvexSequence:
    """Finite, discretely convex samples on a 1-D grid.

    Increments must be non-decreasing up to ``1e-12 * max(1, max |value|)``.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: GridSpec, values):
        if grid.d != 1:
            raise GridMismatch("convex sequences live on 1-D grids")
        vals = np.array(values, dtype=np.float64).reshape(-1)
        if vals.size != grid.n:
            raise GridMismatch(f"expected {grid.n} values, got {vals.size}")
        if not np.isfinite(vals).all():
            raise NotConvex("convex sequences must be finite")
        scale = max(1.0, float(np.max(np.abs(vals))))
        inc = np.diff(vals)
        if np.any(np.diff(inc) < -1e-12 * scale):
            raise NotConvex("increments are not non-decreasing")
        vals.flags.writeable = False
        self.grid = grid
        self.values = vals

    @classmethod
    def from_function(cls, f: GridFunction) -> ConvexSequence:
        return cls(f.grid, f.values)

    def to_function(self) -> GridFunction:
        return GridFunction(self.grid, self.values)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def __repr__(self):
        return f"ConvexSequence({self.grid!r})"


def infconv_convex_fast_1d(f: ConvexSequence, g: ConvexSequence, backend: str | None = None) -> ConvexSequence:
    """O(n) min-plus convolution of convex sequences by merging increments."""
    if f.grid != g.grid:
        raise GridMismatch(f"{f.grid} vs {g.grid}")
    c, n = f.grid.center, f.grid.n
    full = _backend.get(backend).convex_merge(np.ascontiguousarray(f.values), np.ascontiguousarray(g.values))
    # full[t] sits at coordinate (t - 2c) h; output node i at (i - c) h
    return ConvexSequence(f.grid, full[c:c + n])


def infconv_separable(specs: Sequence[FunctionSpec], grid: GridSpec, backend: str | None = None) -> GridFunction:
    """Fold of sum-separable specs via one 1-D fold per axis.

    For ``f_j(x) = sum_k phi_j(x_k)`` the box-constrained minimisation splits
    coordinate-wise, so the d-dimensional result is the sum of the 1-D
    results along each axis.
    """
    specs = list(specs)
    if not specs:
        raise EmptyFold("cannot fold an empty list")
    bad = [str(s) for s in specs if not s.separable]
    if bad:
        raise ValueError(f"specs are not sum-separable: {bad}")
    line = GridSpec(1, grid.L, grid.n)
    one_d = infconv_fold([sample(s, line) for s in specs], backend=backend).values
    total = np.zeros(grid.shape)
    for k in range(grid.d):
        shape = [1] * grid.d
        shape[k] = grid.n
        total = total + one_d.reshape(shape)
    return GridFunction(grid, total)


def fold_specs(specs: Sequence[FunctionSpec], grid: GridSpec, engine: str = "brute",
               backend: str | None = None) -> GridFunction:
    """Sample ``specs`` on ``grid`` and fold them with the chosen engine."""
    if engine == "brute":
        return infconv_fold([sample(s, grid) for s in specs], backend=backend)
    if engine == "separable":
        return infconv_separable(specs, grid, backend=backend)
    raise ValueError(f"unknown engine {engine!r}; expected 'brute' or 'separable'")


def symmetric_surrogate(spec: FunctionSpec, m: int, grid: GridSpec) -> GridFunction:
    """``m * spec(x / m)``: the m-fold sum at the symmetric split ``y_k = x / m``.

    An upper bound on the m-fold inf-convolution of ``spec`` with itself,
    attained for convex specs.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return GridFunction(grid, m * spec(grid.nodes() / m))
