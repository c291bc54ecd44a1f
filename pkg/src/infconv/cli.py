"""Command-line entry point.

Exit codes: 0 success, 1 computation error, 2 configuration error,
3 when ``verify`` finds an inequality violated beyond tolerance.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .engine import fold_specs
from .errors import InfConvError
from .gls import PSampling, fundamental_function, gls_profile, parse_psi
from .grid import FunctionSpec, GridSpec, parse_spec, sample
from .harness import DEFAULT_SEED, empirical_K, scan_ratio, verify_theorem_2_1, verify_theorem_4_1
from .io import dumps_json, grid_function_to_csv, reports_to_csv
from .norms import lp_norm, subgaussian_fit

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_CONFIG = 2
EXIT_VIOLATION = 3


class ConfigError(Exception):
    pass


def _real(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(v):
        raise argparse.ArgumentTypeError("NaN is not allowed")
    return v


def _reals(text: str) -> list[float]:
    return [_real(t) for t in text.split(",") if t.strip()]


def _add_grid(p: argparse.ArgumentParser, n_default: int = 1025):
    g = p.add_argument_group("grid")
    g.add_argument("--d", type=int, default=1, help="dimension, 1..3 (default 1)")
    g.add_argument("--L", type=_real, default=6.0, help="half width of the box (default 6)")
    g.add_argument("--n", type=int, default=n_default, help=f"odd points per axis (default {n_default})")


def _add_output(p: argparse.ArgumentParser):
    g = p.add_argument_group("output")
    g.add_argument("--format", choices=("json", "csv"), default=None,
                   help="report format (default: from --out suffix, else json)")
    g.add_argument("--out", type=Path, default=None, help="output file (default: standard output)")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED, help="recorded seed for reproducibility")


def _add_engine(p: argparse.ArgumentParser):
    p.add_argument("--engine", choices=("brute", "separable"), default="brute",
                   help="inf-convolution engine (default brute)")
    p.add_argument("--backend", choices=("cython", "python"), default=None,
                   help="kernel backend (default: compiled if available)")


def _add_sampling(p: argparse.ArgumentParser):
    g = p.add_argument_group("exponent sampling")
    g.add_argument("--p-min", type=_real, default=None, help="smallest sampled p (default: a of psi)")
    g.add_argument("--p-max", type=_real, default=None, help="largest sampled p (default: min(b, 256))")
    g.add_argument("--p-count", type=int, default=33)
    g.add_argument("--p-spacing", choices=("log", "linear"), default="log")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infconv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conv", help="m-fold infimal convolution of catalog functions")
    p.add_argument("--spec", action="append", required=True, help="catalog function, repeat for each f_j")
    _add_grid(p)
    _add_engine(p)
    _add_output(p)

    p = sub.add_parser("norm", help="L_p norms and optional tail fit of one catalog function")
    p.add_argument("--spec", required=True)
    p.add_argument("--p", action="append", type=_real, required=True, help="exponent (>= 1 or inf), repeatable")
    p.add_argument("--tail-s", type=_real, default=None, help="fit T(u) <= exp(-C u^s) with this s")
    p.add_argument("--u", action="append", type=_real, default=None, help="tail threshold (>= 1), repeatable")
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("glsnorm", help="Grand Lebesgue Space norm of one catalog function")
    p.add_argument("--spec", required=True)
    p.add_argument("--psi", required=True, help="generating function, e.g. power:s=2")
    _add_sampling(p)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("fundamental", help="fundamental function sup_p delta^(1/p)/psi(p)")
    p.add_argument("--psi", required=True)
    p.add_argument("--delta", action="append", type=_real, required=True, help="repeatable")
    _add_output(p)

    p = sub.add_parser("verify", help="check the Lebesgue (2.1) or Grand Lebesgue (4.1) bound")
    p.add_argument("--theorem", choices=("2.1", "4.1"), required=True)
    p.add_argument("--spec", action="append", required=True,
                   help="one spec (repeated m times) or one per component")
    p.add_argument("--m", action="append", type=int, default=None, help="number of copies, repeatable")
    p.add_argument("--p", action="append", type=_real, default=None, help="exponent for 2.1, repeatable")
    p.add_argument("--psi", default=None, help="generating function for 4.1")
    p.add_argument("--factor", choices=("trivial", "given"), default="trivial")
    p.add_argument("--nu", default=None)
    p.add_argument("--zeta", default=None)
    p.add_argument("--surrogate-tol", type=_real, default=None,
                   help="relative tolerance of the surrogate ratio (default 1e-3 for d=1, 1e-2 otherwise)")
    _add_sampling(p)
    _add_grid(p)
    _add_engine(p)
    _add_output(p)

    p = sub.add_parser("scan", help="ratio scan over one parameter of a catalog family")
    p.add_argument("--family", required=True, help="template without the free parameter, e.g. trunc-quadratic:R=7")
    p.add_argument("--param", required=True, help="name of the free parameter, e.g. c")
    p.add_argument("--values", type=_reals, required=True, help="comma-separated parameter values")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--p", type=_real, default=2.0)
    _add_grid(p)
    _add_engine(p)
    _add_output(p)
    return parser


@dataclass
class RunConfig:
    command: str
    grid: GridSpec | None = None
    specs: list[FunctionSpec] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    fmt: str = "json"
    out: Path | None = None
    seed: int = DEFAULT_SEED

    def describe(self) -> dict:
        d = {"command": self.command}
        if self.grid is not None:
            d["grid"] = {"d": self.grid.d, "L": self.grid.L, "n": self.grid.n}
        if self.specs:
            d["specs"] = [str(s) for s in self.specs]
        for k, v in self.values.items():
            d[k] = v if isinstance(v, (int, float, str, bool, list, type(None))) else str(v)
        d["format"] = self.fmt
        return d


def _sampling(args, psi) -> PSampling:
    base = PSampling.for_psi(psi, count=args.p_count, spacing=args.p_spacing)
    lo = base.p_min if args.p_min is None else args.p_min
    hi = base.p_max if args.p_max is None else args.p_max
    return PSampling(lo, hi, args.p_count, args.p_spacing)


def _configure(args) -> RunConfig:
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.out is not None and args.out.suffix.lower() == ".csv" else "json"
    cfg = RunConfig(args.command, fmt=fmt, out=args.out, seed=args.seed)
    if hasattr(args, "d"):
        cfg.grid = GridSpec(args.d, args.L, args.n)
    spec_arg = getattr(args, "spec", None)
    if spec_arg is not None:
        cfg.specs = [parse_spec(s) for s in (spec_arg if isinstance(spec_arg, list) else [spec_arg])]
    v = cfg.values
    if hasattr(args, "engine"):
        v["engine"] = args.engine
        v["backend"] = args.backend
        if args.engine == "separable" and not all(s.separable for s in cfg.specs):
            raise ConfigError("--engine separable needs sum-separable specs (quadratic, indicator-origin)")

    if args.command == "norm":
        for p in args.p:
            if p < 1:
                raise ConfigError(f"--p must be >= 1, got {p}")
        v["p"] = list(args.p)
        if args.tail_s is not None:
            if args.tail_s <= 0:
                raise ConfigError("--tail-s must be positive")
            us = args.u or [1.0]
            if any(u < 1 for u in us) or sorted(set(us)) != us:
                raise ConfigError("--u thresholds must be >= 1, distinct and ascending")
            v["tail_s"], v["u"] = args.tail_s, us
    elif args.command == "glsnorm":
        psi = parse_psi(args.psi)
        v["psi"], v["sampling"] = psi, _sampling(args, psi)
    elif args.command == "fundamental":
        if any(dl < 0 for dl in args.delta):
            raise ConfigError("--delta must be >= 0")
        v["psi"], v["delta"] = parse_psi(args.psi), list(args.delta)
    elif args.command == "verify":
        ms = args.m
        if len(cfg.specs) > 1:
            if ms is not None and ms != [len(cfg.specs)]:
                raise ConfigError("with several --spec, --m must be omitted or equal the number of specs")
            ms = [len(cfg.specs)]
        ms = ms or [2]
        if any(m < 1 for m in ms):
            raise ConfigError("--m must be >= 1")
        v["m"] = ms
        v["theorem"] = args.theorem
        if args.theorem == "2.1":
            ps = args.p or [2.0]
            if any(not (1 <= p < math.inf) for p in ps):
                raise ConfigError("--p must be finite and >= 1 for theorem 2.1")
            v["p"] = ps
            tol = args.surrogate_tol
            v["surrogate_tol"] = tol if tol is not None else (1e-3 if cfg.grid.d == 1 else 1e-2)
        else:
            if args.psi is None:
                raise ConfigError("--psi is required for theorem 4.1")
            psi = parse_psi(args.psi)
            v["psi"], v["sampling"], v["factor"] = psi, _sampling(args, psi), args.factor
            if args.factor == "given":
                if args.nu is None or args.zeta is None:
                    raise ConfigError("--factor given needs --nu and --zeta")
                v["nu"], v["zeta"] = parse_psi(args.nu), parse_psi(args.zeta)
    elif args.command == "scan":
        if args.m < 1 or not (1 <= args.p < math.inf):
            raise ConfigError("--m must be >= 1 and --p finite and >= 1")
        v.update(family=args.family, param=args.param, values=list(args.values), m=args.m, p=args.p)
    return cfg


def _compute(cfg: RunConfig) -> tuple[list[dict], bool, object]:
    """Returns (reports, violated, grid function for csv plot output or None)."""
    v, grid = cfg.values, cfg.grid
    if cfg.command == "conv":
        g = fold_specs(cfg.specs, grid, engine=v["engine"], backend=v["backend"])
        return [{"specs": [str(s) for s in cfg.specs], "m": len(cfg.specs),
                 "min": float(g.values.min()), "max": float(g.values.max()),
                 "samples": [float(x) for x in g.samples]}], False, g
    if cfg.command == "norm":
        f = sample(cfg.specs[0], grid)
        reps = [{"spec": str(cfg.specs[0]), "p": p, "norm": lp_norm(f, p)} for p in v["p"]]
        if "tail_s" in v:
            t = subgaussian_fit(f, v["tail_s"], v["u"])
            reps.append({"spec": str(cfg.specs[0]), "s": t.s, "u_grid": t.u_grid, "tail_values": t.tail_values,
                         "fitted_C": t.fitted_C, "vacuous": t.vacuous, "subgaussian": t.subgaussian,
                         "notes": t.notes})
        return reps, False, None
    if cfg.command == "glsnorm":
        prof = gls_profile(sample(cfg.specs[0], grid), v["psi"], v["sampling"])
        return [{"spec": str(cfg.specs[0]), "psi": str(v["psi"]), "value": prof.value, "p_star": prof.p_star,
                 "p_values": list(prof.p_values), "ratios": list(prof.ratios)}], False, None
    if cfg.command == "fundamental":
        return [{"psi": str(v["psi"]), "delta": dl, "value": fundamental_function(v["psi"], dl)}
                for dl in v["delta"]], False, None
    if cfg.command == "verify":
        reps = []
        for m in v["m"]:
            specs = cfg.specs if len(cfg.specs) > 1 else cfg.specs * m
            if v["theorem"] == "2.1":
                for p in v["p"]:
                    if len(cfg.specs) == 1:
                        r = verify_theorem_2_1(grid.d, m, p, cfg.specs[0], grid, engine=v["engine"],
                                               surrogate_tol=v["surrogate_tol"], backend=v["backend"])
                    else:
                        r = empirical_K(specs, p, grid, engine=v["engine"], backend=v["backend"])
                    reps.append(r)
            else:
                reps.append(verify_theorem_4_1(specs, v["psi"], grid, v["sampling"], v["factor"],
                                               v.get("nu"), v.get("zeta"), engine=v["engine"],
                                               backend=v["backend"]))
        violated = any(not r.satisfied for r in reps)
        return [r.to_dict() for r in reps], violated, None
    if cfg.command == "scan":
        res = scan_ratio(v["family"], v["param"], v["values"], grid.d, v["m"], v["p"], grid,
                         engine=v["engine"], backend=v["backend"])
        return [res.to_dict()], False, None
    raise AssertionError(cfg.command)


def _render(cfg: RunConfig, reports: list[dict], gridfun) -> str:
    if cfg.fmt == "csv":
        if gridfun is not None:
            return grid_function_to_csv(gridfun)
        if cfg.command == "scan":
            rows = [{"param": e["param"], "error": e["error"], **(e["report"] or {})}
                    for e in reports[0]["entries"]]
            return reports_to_csv(rows)
        return reports_to_csv(reports)
    doc = {"command": cfg.command, "config": cfg.describe(), "reports": reports,
           "tool_version": __version__, "seed": cfg.seed}
    return dumps_json(doc)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _configure(args)
    except (ConfigError, InfConvError, ValueError) as exc:
        print(f"infconv {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        reports, violated, gridfun = _compute(cfg)
    except InfConvError as exc:
        print(f"infconv {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = _render(cfg, reports, gridfun)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)
    if violated:
        print(f"infconv {args.command}: at least one inequality is violated beyond tolerance", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
