"""Lebesgue norms by uniform-weight quadrature, tail functions and tail fits.

Exponents are plain floats: ``p >= 1`` or ``math.inf`` for the essential
supremum.  Every node carries the weight ``h**d`` (boundary included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IdentityNotApplicable
from .grid import FunctionSpec, GridFunction, GridSpec, dilate, sample

__all__ = [
    "check_exponent",
    "lp_norm",
    "gaussian_lp_norm",
    "DilationCheck",
    "dilation_norm_identity_check",
    "tail_function",
    "TailReport",
    "subgaussian_fit",
]


def check_exponent(p) -> float:
    """Validate an exponent, returning it as a float (``math.inf`` allowed)."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    return p


def lp_norm(f: GridFunction, p: float) -> float:
    """Discrete ``L_p`` norm ``(h^d sum |f_i|^p)^(1/p)``; ``p = inf`` gives the max.

    Any +inf sample makes the norm +inf.  The sum is taken on ``|f| / max|f|``
    to avoid overflow; numpy's pairwise summation keeps it deterministic.
    """
    p = check_exponent(p)
    a = np.abs(f.values)
    if np.isinf(a).any():
        return math.inf
    top = float(a.max())
    if top == 0.0:
        return 0.0
    if p == math.inf:
        return top
    s = float(np.sum((a / top) ** p))
    return top * (f.grid.cell_volume * s) ** (1.0 / p)


def gaussian_lp_norm(p: float, d: int, c: float = 1.0) -> float:
    """Closed form ``||exp(-c|x|^2)||_p`` over R^d, i.e. ``(pi / (c p))^(d / (2p))``."""
    p = check_exponent(p)
    if p == math.inf:
        return 1.0
    return (math.pi / (c * p)) ** (d / (2.0 * p))


@dataclass(frozen=True)
class DilationCheck:
    lhs: float
    rhs: float
    rel_gap: float
    lam: float
    p: float


def dilation_norm_identity_check(spec: FunctionSpec, lam: float, p: float, grid: GridSpec) -> DilationCheck:
    """Compare ``||f(lam x)||_p`` on ``grid`` with ``lam^(-d/p) ||f||_p`` on the matched grid.

    The matched grid covers ``[-lam L, lam L]^d`` with the same node count,
    so its nodes are exactly ``lam`` times the original ones and the two
    Riemann sums agree up to rounding.
    """
    p = check_exponent(p)
    if p == math.inf:
        raise IdentityNotApplicable("the dilation identity is checked for finite p only")
    lhs = lp_norm(dilate(spec, lam, grid), p)
    base = lp_norm(sample(spec, grid.scaled(lam)), p)
    if math.isinf(lhs) or math.isinf(base):
        raise IdentityNotApplicable(f"{spec} has infinite L_{p} norm on the relevant grids")
    rhs = lam ** (-grid.d / p) * base
    if rhs == 0.0:
        raise IdentityNotApplicable(f"{spec} has zero L_{p} norm")
    return DilationCheck(lhs=lhs, rhs=rhs, rel_gap=abs(lhs - rhs) / rhs, lam=lam, p=p)


def tail_function(f: GridFunction, u: float) -> float:
    """Counting-measure estimate of ``mes{x : |f(x)| >= u}``."""
    if not u >= 1:
        raise ValueError(f"tail thresholds must satisfy u >= 1, got {u}")
    return f.grid.cell_volume * int(np.count_nonzero(np.abs(f.values) >= u))


@dataclass
class TailReport:
    u_grid: list[float]
    tail_values: list[float]
    s: float
    fitted_C: float | None
    vacuous: bool
    notes: list[str] = field(default_factory=list)

    @property
    def subgaussian(self) -> bool:
        """True when a positive constant fits every sampled threshold."""
        return self.vacuous or (self.fitted_C is not None and self.fitted_C > 0)


def subgaussian_fit(f: GridFunction, s: float, u_grid) -> TailReport:
    """Largest ``C`` with ``T_f(u) <= exp(-C u^s)`` on the sampled thresholds.

    This only checks the tail-bound direction on finitely many ``u``; it says
    nothing about membership in the corresponding Grand Lebesgue Space.
    """
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    us = [float(u) for u in u_grid]
    if not us:
        raise ValueError("u_grid must not be empty")
    if any(u < 1 for u in us) or any(b <= a for a, b in zip(us, us[1:])):
        raise ValueError("u_grid must be strictly ascending with every u >= 1")
    tails = [tail_function(f, u) for u in us]
    positive = [(u, t) for u, t in zip(us, tails) if t > 0]
    if not positive:
        return TailReport(us, tails, s, None, True,
                          ["every sampled tail is 0: the bound holds for any C"])
    C = min(-math.log(t) / u**s for u, t in positive)
    # rounding in exp/log can leave the bound violated by an ulp
    while any(t > math.exp(-C * u**s) for u, t in positive):
        C = math.nextafter(C, -math.inf)
    notes = []
    if C <= 0:
        notes.append("fitted constant is not positive: tail mass at u >= 1 is at least 1")
    return TailReport(us, tails, s, C, False, notes)
