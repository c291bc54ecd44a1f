"""Generating functions, Grand Lebesgue Space norms and fundamental functions.

A generating function ``psi`` maps an exponent ``p >= 1`` to ``(0, inf]``.
Its domain is ``[a, b]`` (``[a, inf)`` when ``b`` is infinite); outside the
domain it evaluates to ``+inf``.  Suprema over ``p`` are taken on a finite
:class:`PSampling`, so computed GLS norms are lower bounds of the true ones;
:class:`GlsProfile` keeps the p-grid and the maximiser for auditing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import EmptyDomain, IndeterminatePsi, NotAFactorization, SpecParseError
from .grid import GridFunction, format_params
from .norms import lp_norm

__all__ = [
    "DEFAULT_P_CAP",
    "GeneratingFunction",
    "Power",
    "Degenerate",
    "ConstantOne",
    "Ratio",
    "Tabulated",
    "PSampling",
    "GlsProfile",
    "eval_psi",
    "gls_profile",
    "gls_norm",
    "fundamental_function",
    "factor",
    "parse_psi",
]

#: Upper limit of sampled exponents when ``b = inf``.
DEFAULT_P_CAP = 256.0


class GeneratingFunction:
    """Base class; subclasses define ``a``, ``b`` and ``_value`` on the domain."""

    a: float
    b: float

    def in_domain(self, p: float) -> bool:
        return self.a <= p <= self.b and p < math.inf

    def __call__(self, p: float) -> float:
        if not self.in_domain(p):
            return math.inf
        return self._value(p)

    def _value(self, p: float) -> float:
        raise NotImplementedError

    def atoms(self) -> tuple[float, ...]:
        """Exponents that any sampling of this function must include."""
        return ()

    def finite_upper(self, cap: float = DEFAULT_P_CAP) -> float:
        return min(self.b, max(cap, self.a))


def _check_interval(a: float, b: float):
    if not a >= 1:
        raise SpecParseError(f"domain must satisfy a >= 1, got a={a}")
    if not b > a:
        raise SpecParseError(f"domain must satisfy b > a, got a={a}, b={b}")


@dataclass(frozen=True)
class Power(GeneratingFunction):
    """``p^(1/s)`` on ``[a, b]``, by default ``[1, inf)``."""

    s: float
    a: float = 1.0
    b: float = math.inf

    def __post_init__(self):
        if not self.s > 0:
            raise SpecParseError(f"power exponent s must be positive, got {self.s}")
        _check_interval(self.a, self.b)

    def _value(self, p):
        return p ** (1.0 / self.s)

    def __str__(self):
        extra = {}
        if self.a != 1.0:
            extra["a"] = self.a
        if self.b != math.inf:
            extra["b"] = self.b
        return "power:" + format_params({"s": self.s, **extra})


@dataclass(frozen=True)
class Degenerate(GeneratingFunction):
    """1 at ``p = r`` (exact comparison), ``+inf`` elsewhere."""

    r: float

    def __post_init__(self):
        if not self.r >= 1 or self.r == math.inf:
            raise SpecParseError(f"degenerate exponent r must be finite and >= 1, got {self.r}")

    @property
    def a(self):
        return self.r

    @property
    def b(self):
        return self.r

    def in_domain(self, p):
        return p == self.r

    def _value(self, p):
        return 1.0

    def atoms(self):
        return (self.r,)

    def __str__(self):
        return "degenerate:" + format_params({"r": self.r})


@dataclass(frozen=True)
class ConstantOne(GeneratingFunction):
    """``1`` on ``[a, b]``."""

    a: float = 1.0
    b: float = math.inf

    def __post_init__(self):
        _check_interval(self.a, self.b)

    def _value(self, p):
        return 1.0

    def __str__(self):
        return "one:" + format_params({"a": self.a, "b": self.b})


@dataclass(frozen=True)
class Ratio(GeneratingFunction):
    """``num(p) / den(p)`` on the intersection of both domains."""

    num: GeneratingFunction
    den: GeneratingFunction

    def __post_init__(self):
        if max(self.num.a, self.den.a) > min(self.num.b, self.den.b):
            raise SpecParseError(f"domains of {self.num} and {self.den} do not intersect")

    @property
    def a(self):
        return max(self.num.a, self.den.a)

    @property
    def b(self):
        return min(self.num.b, self.den.b)

    def in_domain(self, p):
        return self.num.in_domain(p) and self.den.in_domain(p)

    def __call__(self, p):
        if not (self.a <= p <= self.b) or p == math.inf:
            return math.inf
        nu, ze = self.num(p), self.den(p)
        if math.isinf(nu) and math.isinf(ze):
            raise IndeterminatePsi(f"{self}: inf/inf at p={p}")
        if math.isinf(ze) or nu == 0.0:
            raise IndeterminatePsi(f"{self}: ratio vanishes at p={p}")
        return nu / ze

    def atoms(self):
        return tuple(sorted(set(self.num.atoms()) | set(self.den.atoms())))

    def __str__(self):
        return f"ratio:num={self.num},den={self.den}"


@dataclass(frozen=True)
class Tabulated(GeneratingFunction):
    """Piecewise-linear interpolation of positive values on ascending knots."""

    p_values: tuple[float, ...]
    psi_values: tuple[float, ...]

    def __post_init__(self):
        ps = tuple(float(v) for v in self.p_values)
        vs = tuple(float(v) for v in self.psi_values)
        if len(ps) < 2 or len(ps) != len(vs):
            raise SpecParseError("tabulated psi needs at least two (p, psi) pairs of equal length")
        if ps[0] < 1 or any(b <= a for a, b in zip(ps, ps[1:])):
            raise SpecParseError("tabulated knots must be strictly ascending and >= 1")
        if any(not (0 < v < math.inf) for v in vs):
            raise SpecParseError("tabulated psi values must be positive and finite")
        object.__setattr__(self, "p_values", ps)
        object.__setattr__(self, "psi_values", vs)

    @property
    def a(self):
        return self.p_values[0]

    @property
    def b(self):
        return self.p_values[-1]

    def _value(self, p):
        return float(np.interp(p, self.p_values, self.psi_values))

    def atoms(self):
        return self.p_values

    def __str__(self):
        return ("table:p=" + ";".join(repr(v) for v in self.p_values)
                + ",psi=" + ";".join(repr(v) for v in self.psi_values))


def eval_psi(gf: GeneratingFunction, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    return gf(p)


@dataclass(frozen=True)
class PSampling:
    """Finite grid of exponents standing in for ``sup over p``."""

    p_min: float
    p_max: float
    count: int = 33
    spacing: str = "log"

    def __post_init__(self):
        if not (1 <= self.p_min < self.p_max < math.inf):
            raise ValueError(f"need 1 <= p_min < p_max < inf, got {self.p_min}, {self.p_max}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count}")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            pts = np.geomspace(self.p_min, self.p_max, int(self.count))
        else:
            pts = np.linspace(self.p_min, self.p_max, int(self.count))
        # pin the end points exactly
        pts[0], pts[-1] = self.p_min, self.p_max
        return pts

    @classmethod
    def for_psi(cls, gf: GeneratingFunction, count: int = 33, cap: float = DEFAULT_P_CAP,
                spacing: str = "log") -> PSampling:
        """Sampling of ``[a, min(b, cap)]``; point domains get a unit-wide window."""
        lo = gf.a
        hi = gf.finite_upper(cap)
        if hi <= lo:
            hi = lo + 1.0
        return cls(lo, hi, count, spacing)

    def effective_points(self, gf: GeneratingFunction) -> np.ndarray:
        """Sample points plus the atoms of ``gf`` lying in ``[p_min, p_max]``."""
        extra = [q for q in gf.atoms() if self.p_min <= q <= self.p_max]
        return np.unique(np.concatenate([self.points(), np.asarray(extra, dtype=float)]))


@dataclass(frozen=True)
class GlsProfile:
    value: float
    p_star: float
    p_values: tuple[float, ...]
    norms: tuple[float, ...]
    psi_values: tuple[float, ...]
    ratios: tuple[float, ...]

    def __float__(self):
        return self.value


def _profile_from_norms(gf: GeneratingFunction, ps, norms) -> GlsProfile:
    psis = [gf(float(p)) for p in ps]
    ratios = []
    for nrm, psi in zip(norms, psis):
        # C / inf := 0
        ratios.append(0.0 if math.isinf(psi) else nrm / psi)
    if all(math.isinf(v) for v in psis):
        raise EmptyDomain(f"{gf} is +inf at every sampled exponent")
    best = int(np.argmax(ratios))
    return GlsProfile(value=float(ratios[best]), p_star=float(ps[best]), p_values=tuple(float(p) for p in ps),
                      norms=tuple(norms), psi_values=tuple(psis), ratios=tuple(ratios))


def gls_profile(f: GridFunction, gf: GeneratingFunction, sampling: PSampling) -> GlsProfile:
    """Discrete ``sup_p ||f||_p / psi(p)`` with the full per-exponent breakdown."""
    ps = sampling.effective_points(gf)
    norms = [lp_norm(f, float(p)) for p in ps]
    return _profile_from_norms(gf, ps, norms)


def gls_norm(f: GridFunction, gf: GeneratingFunction, sampling: PSampling) -> float:
    return gls_profile(f, gf, sampling).value


def fundamental_function(gf: GeneratingFunction, delta: float, cap: float = DEFAULT_P_CAP,
                         count: int = 129) -> float:
    """``sup_p delta^(1/p) / psi(p)`` over the domain of ``gf``.

    Closed forms for :class:`Degenerate` and :class:`ConstantOne`; otherwise a
    log-spaced scan of ``[a, min(b, cap)]`` refined by bounded Brent
    (golden-section with parabolic steps) around the best grid point.
    """
    if not delta >= 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return 0.0
    if isinstance(gf, Degenerate):
        return delta ** (1.0 / gf.r)
    if isinstance(gf, ConstantOne):
        if delta >= 1:
            return delta ** (1.0 / gf.a)
        return 1.0 if gf.b == math.inf else delta ** (1.0 / gf.b)

    log_delta = math.log(delta)

    def objective(t):
        p = math.exp(t)
        psi = gf(p)
        if math.isinf(psi):
            return -math.inf
        return log_delta / p - math.log(psi)

    lo = math.log(gf.a)
    hi = math.log(gf.finite_upper(cap))
    if hi <= lo:
        ts = np.array([lo])
    else:
        ts = np.linspace(lo, hi, count)
        ts[0], ts[-1] = lo, hi
    atoms = [math.log(q) for q in gf.atoms() if gf.in_domain(q)]
    ts = np.unique(np.concatenate([ts, atoms]))
    vals = np.array([objective(t) for t in ts])
    if np.all(np.isneginf(vals)):
        raise EmptyDomain(f"{gf} is +inf on the scanned exponents")
    k = int(np.argmax(vals))
    best = float(vals[k])
    if len(ts) > 2:
        left, right = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
        if right > left:
            res = minimize_scalar(lambda t: -objective(t), bounds=(left, right), method="bounded",
                                  options={"xatol": 1e-12})
            if res.success and -res.fun > best:
                best = float(-res.fun)
    return math.exp(best)


def _probe_points(gf: GeneratingFunction, cap: float = DEFAULT_P_CAP) -> list[float]:
    pts = set(gf.atoms())
    pts.update(q for q in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0) if gf.in_domain(q))
    if gf.b > gf.a:
        pts.update(float(q) for q in np.geomspace(gf.a, gf.finite_upper(cap), 17) if gf.in_domain(float(q)))
    return sorted(pts)


def factor(gf: GeneratingFunction, strategy: str = "trivial", nu: GeneratingFunction | None = None,
           zeta: GeneratingFunction | None = None) -> tuple[GeneratingFunction, GeneratingFunction]:
    """Split ``psi = nu / zeta``.

    ``"trivial"`` returns ``(psi, 1)`` with the constant one on the domain of
    ``psi``; ``"given"`` validates a user-supplied pair on a probe grid.
    """
    if strategy == "trivial":
        if gf.a == gf.b:
            return gf, Degenerate(gf.a)
        return gf, ConstantOne(gf.a, gf.b)
    if strategy != "given":
        raise ValueError(f"unknown factorisation strategy {strategy!r}")
    if nu is None or zeta is None:
        raise NotAFactorization("the 'given' strategy needs both nu and zeta")
    probes = _probe_points(gf)
    for p in probes:
        if not (nu.in_domain(p) and zeta.in_domain(p)):
            raise NotAFactorization(f"p={p} lies in Dom[psi] but not in Dom[nu] and Dom[zeta]")
        want = gf(p)
        got = nu(p) / zeta(p)
        if not abs(got - want) <= 1e-12 * abs(want):
            raise NotAFactorization(f"nu/zeta = {got!r} but psi = {want!r} at p={p}")
    return nu, zeta


def _split_top(body: str) -> dict[str, str]:
    out = {}
    for item in body.split(","):
        key, sep, val = item.partition("=")
        if not sep:
            raise SpecParseError(f"expected key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _real(text: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise SpecParseError(f"{text!r}: {key}={raw!r} is not a number") from None


def parse_psi(text: str) -> GeneratingFunction:
    """Parse ``power:s=2``, ``degenerate:r=3``, ``one:a=1,b=inf``,
    ``ratio:num=<psi>,den=<psi>`` or ``table:p=1;2;4,psi=1;1.5;2``."""
    text = text.strip()
    name, _, body = text.partition(":")
    name = name.strip().lower()
    if name == "ratio":
        if not body.startswith("num=") or ",den=" not in body:
            raise SpecParseError(f"{text!r}: expected ratio:num=<psi>,den=<psi>")
        num, den = body[len("num="):].rsplit(",den=", 1)
        return Ratio(parse_psi(num), parse_psi(den))
    kv = _split_top(body) if body.strip() else {}
    if name == "table":
        if set(kv) != {"p", "psi"}:
            raise SpecParseError(f"{text!r}: expected table:p=..;..,psi=..;..")
        ps = [_real(text, "p", v) for v in kv["p"].split(";")]
        vs = [_real(text, "psi", v) for v in kv["psi"].split(";")]
        return Tabulated(tuple(ps), tuple(vs))
    nums = {k: _real(text, k, v) for k, v in kv.items()}
    allowed = {"power": ({"s"}, {"a", "b"}), "degenerate": ({"r"}, set()), "one": (set(), {"a", "b"})}
    if name not in allowed:
        raise SpecParseError(f"unknown generating function {name!r}")
    required, optional = allowed[name]
    if not required <= set(nums) or not set(nums) <= required | optional:
        raise SpecParseError(f"{text!r}: parameters must be {sorted(required)} plus optional {sorted(optional)}")
    if name == "power":
        return Power(nums["s"], nums.get("a", 1.0), nums.get("b", math.inf))
    if name == "degenerate":
        return Degenerate(nums["r"])
    return ConstantOne(nums.get("a", 1.0), nums.get("b", math.inf))
