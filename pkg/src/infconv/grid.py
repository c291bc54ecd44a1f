"""Truncated uniform grids, grid functions and the analytic function catalog.

A grid covers ``[-L, L]^d`` with an odd number ``n`` of nodes per axis, so
the origin is always a node and index differences map exactly onto node
differences.  Node coordinates are computed as ``(i - c) * h`` with
``c = (n - 1) // 2``; this keeps the origin at exactly ``0.0`` and makes the
grid bitwise symmetric under negation.

Samples are float64 arrays in which ``+inf`` plays the role of the extended
real value (indicator-type functions, points outside a truncated domain).
NaN and ``-inf`` are rejected.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import (
    DegenerateFunction,
    GridMismatch,
    GridTooLarge,
    InvalidGrid,
    InvalidSample,
    SpecParseError,
)

__all__ = [
    "DEFAULT_NODE_CAP",
    "GridSpec",
    "GridFunction",
    "FunctionSpec",
    "Gaussian",
    "ScaledGaussian",
    "Quadratic",
    "Tent",
    "IndicatorOrigin",
    "TruncatedQuadratic",
    "make_grid",
    "node_cap",
    "sample",
    "dilate",
    "parse_spec",
    "format_params",
]

DEFAULT_NODE_CAP = 2**24
MAX_DIMENSION = 3


def node_cap() -> int:
    """Current node cap, honouring the ``INFCONV_NODE_CAP`` override."""
    raw = os.environ.get("INFCONV_NODE_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_NODE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidGrid(f"INFCONV_NODE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise InvalidGrid(f"INFCONV_NODE_CAP must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class GridSpec:
    """Origin-centred uniform grid on ``[-L, L]^d``.

    Parameters
    ----------
    d : int
        Spatial dimension, 1 to 3.
    L : float
        Half width of the box.
    n : int
        Odd number of nodes per axis, at least 3.
    """

    d: int
    L: float
    n: int

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or not 1 <= self.d <= MAX_DIMENSION:
            raise InvalidGrid(f"dimension must be an integer in 1..{MAX_DIMENSION}, got {self.d!r}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise InvalidGrid(f"half width must be positive and finite, got {self.L!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 3:
            raise InvalidGrid(f"points per axis must be an integer >= 3, got {self.n!r}")
        if self.n % 2 == 0:
            raise InvalidGrid(f"points per axis must be odd so the origin is a node, got {self.n}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "L", float(self.L))
        cap = node_cap()
        if self.n**self.d > cap:
            raise GridTooLarge(f"{self.n}^{self.d} = {self.n ** self.d} nodes exceeds the cap of {cap}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.n - 1)

    @property
    def center(self) -> int:
        """Index of the origin along every axis."""
        return (self.n - 1) // 2

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return self.h**self.d

    def axis(self) -> np.ndarray:
        """Coordinates of the nodes along one axis."""
        return (np.arange(self.n) - self.center) * self.h

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``grid.shape + (d,)``."""
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack(mesh, axis=-1)

    def compatible(self, other: GridSpec) -> bool:
        """Same dimension and (up to rounding) the same spacing."""
        return self.d == other.d and math.isclose(self.h, other.h, rel_tol=1e-12)

    def extended(self, k: int) -> GridSpec:
        """Grid with the same spacing covering ``[-kL, kL]^d``."""
        return GridSpec(self.d, k * self.L, k * (self.n - 1) + 1)

    def scaled(self, lam: float) -> GridSpec:
        """Grid over ``[-lam L, lam L]^d`` with the same node count."""
        return GridSpec(self.d, lam * self.L, self.n)


def make_grid(d: int, L: float, n: int) -> GridSpec:
    return GridSpec(d, L, n)


class GridFunction:
    """Extended-real samples of a function on a :class:`GridSpec`.

    ``values`` has shape ``grid.shape`` (row-major by axis order) and is
    read-only; ``samples`` is the flat view of length ``n**d``.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: GridSpec, values):
        arr = np.array(values, dtype=np.float64)
        if arr.size != grid.size:
            raise InvalidSample(f"expected {grid.size} samples, got {arr.size}")
        arr = arr.reshape(grid.shape)
        if np.isnan(arr).any():
            raise InvalidSample("samples contain NaN")
        if np.isneginf(arr).any():
            raise InvalidSample("samples contain -inf")
        if not np.isfinite(arr).any():
            raise DegenerateFunction("every sample is +inf")
        arr.flags.writeable = False
        self.grid = grid
        self.values = arr

    @property
    def samples(self) -> np.ndarray:
        return self.values.reshape(-1)

    @property
    def scale(self) -> float:
        """``max(1, max |finite sample|)``, the scale used by relative tolerances."""
        fin = self.values[np.isfinite(self.values)]
        return max(1.0, float(np.max(np.abs(fin))))

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def scaled(self, c: float) -> GridFunction:
        if c < 0:
            raise InvalidSample("scaling by a negative factor would create -inf samples")
        with np.errstate(invalid="ignore"):
            vals = self.values * c
        # 0 * inf: the scaled function keeps +inf where the original had it
        vals[np.isinf(self.values)] = np.inf
        return GridFunction(self.grid, vals)

    def __mul__(self, c):
        if not isinstance(c, (int, float, np.floating, np.integer)):
            return NotImplemented
        return self.scaled(float(c))

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        if other.grid != self.grid:
            raise GridMismatch(f"{self.grid} vs {other.grid}")
        return GridFunction(self.grid, self.values + other.values)

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"GridFunction({self.grid!r}, min={np.min(self.values):.6g}, max={np.max(self.values):.6g})"


def format_params(params: dict) -> str:
    return ",".join(f"{k}={_fmt_real(v)}" for k, v in params.items())


def _fmt_real(v: float) -> str:
    if v == math.inf:
        return "inf"
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _sq_norm(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    return np.sum(points * points, axis=-1)


class FunctionSpec:
    """Analytic catalog function, evaluable at arbitrary points of R^d.

    Calling a spec with an array of shape ``(..., d)`` returns the values
    with shape ``(...)``.  All catalog functions are nonnegative.
    """

    name: ClassVar[str] = ""
    #: Sum-separable across coordinates: f(x) = sum_k phi(x_k).
    separable: ClassVar[bool] = False
    #: Convex on its domain.
    convex: ClassVar[bool] = False

    def __call__(self, points) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def lipschitz(self) -> float | None:
        """Lipschitz constant on the domain where the function is finite, if bounded."""
        return None

    def __str__(self):
        p = self.params()
        return self.name + (":" + format_params(p) if p else "")


@dataclass(frozen=True)
class Gaussian(FunctionSpec):
    """``exp(-||x||^2)``."""

    name: ClassVar[str] = "gaussian"

    def __call__(self, points):
        return np.exp(-_sq_norm(points))

    def lipschitz(self):
        return math.sqrt(2.0 / math.e)


@dataclass(frozen=True)
class ScaledGaussian(FunctionSpec):
    """``exp(-c ||x||^2)``."""

    c: float
    name: ClassVar[str] = "gaussian"

    def __post_init__(self):
        if not self.c > 0:
            raise SpecParseError(f"gaussian width c must be positive, got {self.c}")

    def __call__(self, points):
        return np.exp(-self.c * _sq_norm(points))

    def params(self):
        return {"c": self.c}

    def lipschitz(self):
        return math.sqrt(2.0 * self.c / math.e)


@dataclass(frozen=True)
class Quadratic(FunctionSpec):
    """``c ||x||^2``; with ``c = 0`` this is the zero function."""

    c: float
    name: ClassVar[str] = "quadratic"
    separable: ClassVar[bool] = True
    convex: ClassVar[bool] = True

    def __post_init__(self):
        if not self.c >= 0:
            raise SpecParseError(f"quadratic coefficient must be >= 0, got {self.c}")

    def __call__(self, points):
        return self.c * _sq_norm(points)

    def params(self):
        return {"c": self.c}


@dataclass(frozen=True)
class Tent(FunctionSpec):
    """``max(0, 1 - ||x|| / R)``."""

    R: float
    name: ClassVar[str] = "tent"

    def __post_init__(self):
        if not self.R > 0:
            raise SpecParseError(f"tent radius must be positive, got {self.R}")

    def __call__(self, points):
        return np.maximum(0.0, 1.0 - np.sqrt(_sq_norm(points)) / self.R)

    def params(self):
        return {"R": self.R}

    def lipschitz(self):
        return 1.0 / self.R


@dataclass(frozen=True)
class IndicatorOrigin(FunctionSpec):
    """0 at the origin, ``+inf`` everywhere else (min-plus identity)."""

    name: ClassVar[str] = "indicator-origin"
    separable: ClassVar[bool] = True
    convex: ClassVar[bool] = True

    def __call__(self, points):
        points = np.asarray(points, dtype=np.float64)
        at_origin = np.all(points == 0.0, axis=-1)
        return np.where(at_origin, 0.0, np.inf)


@dataclass(frozen=True)
class TruncatedQuadratic(FunctionSpec):
    """``c ||x||^2`` inside the closed ball of radius ``R``, ``+inf`` outside."""

    c: float
    R: float
    name: ClassVar[str] = "trunc-quadratic"
    convex: ClassVar[bool] = True

    def __post_init__(self):
        if not self.c > 0:
            raise SpecParseError(f"trunc-quadratic coefficient must be positive, got {self.c}")
        if not self.R > 0:
            raise SpecParseError(f"trunc-quadratic radius must be positive, got {self.R}")

    def __call__(self, points):
        r2 = _sq_norm(points)
        return np.where(r2 <= self.R * self.R, self.c * r2, np.inf)

    def params(self):
        return {"c": self.c, "R": self.R}

    def lipschitz(self):
        return 2.0 * self.c * self.R


def sample(spec: FunctionSpec, grid: GridSpec) -> GridFunction:
    """Evaluate ``spec`` exactly at every node of ``grid``."""
    return GridFunction(grid, spec(grid.nodes()))


def dilate(spec: FunctionSpec, lam: float, grid: GridSpec) -> GridFunction:
    """Samples of ``x -> spec(lam * x)``, evaluated analytically."""
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam}")
    return GridFunction(grid, spec(lam * grid.nodes()))


def _parse_kv(body: str, text: str) -> dict[str, float]:
    out = {}
    for item in body.split(","):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise SpecParseError(f"expected key=value in {text!r}, got {item!r}")
        if key in out:
            raise SpecParseError(f"duplicate parameter {key!r} in {text!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise SpecParseError(f"parameter {key!r} in {text!r} is not a number: {val!r}") from None
    return out


_CATALOG = {
    "gaussian": ((), ("c",)),
    "quadratic": (("c",), ()),
    "tent": (("R",), ()),
    "indicator-origin": ((), ()),
    "trunc-quadratic": (("c", "R"), ()),
}


def parse_spec(text: str) -> FunctionSpec:
    """Parse the textual catalog form, e.g. ``trunc-quadratic:c=1,R=3``."""
    name, _, body = text.strip().partition(":")
    name = name.strip().lower()
    if name not in _CATALOG:
        raise SpecParseError(f"unknown function {name!r}; expected one of {sorted(_CATALOG)}")
    params = _parse_kv(body, text) if body.strip() else {}
    required, optional = _CATALOG[name]
    missing = [k for k in required if k not in params]
    extra = [k for k in params if k not in required and k not in optional]
    if missing or extra:
        raise SpecParseError(f"{text!r}: missing {missing} / unexpected {extra} parameters")
    if name == "gaussian":
        return ScaledGaussian(params["c"]) if "c" in params else Gaussian()
    if name == "quadratic":
        return Quadratic(params["c"])
    if name == "tent":
        return Tent(params["R"])
    if name == "indicator-origin":
        return IndicatorOrigin()
    return TruncatedQuadratic(params["c"], params["R"])
