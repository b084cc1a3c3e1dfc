"""Command-line front end.

Exit codes: 0 success with every check passing, 1 a check failed, 2 usage
or configuration error.  Structured reports are JSON, radial profiles CSV.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import density, logconvex, regularity
from .extremal import SolveOptions, ZeroKernelError, kernel_continuity_probe, solve, solve_p2, subspace_convergence
from .quadrature import InvalidOrderError, NonConvergentTailError, build_grid
from .serialize import csv_table, dumps, read_poly
from .space import Exponents, means_profile
from .weights import WeightDomainError, WeightSpec, parse_weight


class ConfigError(ValueError):
    """A rejected configuration; the message starts with the offending key."""


@dataclass
class RunConfig:
    weight: str
    p: float = 2.0
    degree: int = 8
    kernel: str | None = None
    tol: float | None = None
    grid_tol: float = 1e-12
    radial_order: int | None = None
    angular_order: int | None = None
    max_degree: int | None = None
    out: str | None = None

    def __post_init__(self):
        try:
            parse_weight(self.weight)
        except (ValueError, TypeError, AttributeError) as exc:
            msg = str(exc)
            raise ConfigError(msg if msg.startswith("weight") else f"weight: {msg}") from None
        if not isinstance(self.p, (int, float)) or not self.p > 0 or math.isinf(self.p):
            raise ConfigError(f"p: must be a positive finite number, got {self.p!r}")
        if not isinstance(self.degree, int) or self.degree < 0:
            raise ConfigError(f"degree: must be a non-negative integer, got {self.degree!r}")
        for key in ("tol", "grid_tol"):
            v = getattr(self, key)
            if v is not None and not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"{key}: must be positive, got {v!r}")
        for key in ("radial_order", "angular_order"):
            v = getattr(self, key)
            if v is not None and not (isinstance(v, int) and v >= 4):
                raise ConfigError(f"{key}: must be an integer >= 4, got {v!r}")
        if self.max_degree is not None and not (isinstance(self.max_degree, int) and self.max_degree >= 0):
            raise ConfigError(f"max_degree: must be a non-negative integer, got {self.max_degree!r}")

    @property
    def spec(self) -> WeightSpec:
        return parse_weight(self.weight)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in names:
                raise ConfigError(f"{key}: unknown configuration key")
        if "weight" not in data:
            raise ConfigError("weight: required")
        return cls(**data)

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: not valid JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
        return cls.from_dict(data)


def _threads() -> int:
    raw = os.environ.get("EXTREMAL_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"EXTREMAL_THREADS: not an integer: {raw!r}") from None
    return min(4, os.cpu_count() or 1)


def _map(fn, items):
    """Order-preserving map, threaded up to EXTREMAL_THREADS."""
    items = list(items)
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> list:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _config(args, **defaults) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = RunConfig.parse(fh.read()).to_dict()
    for key in ("weight", "p", "degree", "kernel", "tol", "grid_tol", "radial_order",
                "angular_order", "max_degree", "out"):
        v = getattr(args, key, None)
        if isinstance(v, list):
            v = v[0] if v else None
        if v is not None:
            base[key] = v
    for key, v in defaults.items():
        base.setdefault(key, v)
    return RunConfig.from_dict(base)


def _grid(cfg: RunConfig, spec: WeightSpec, degree: int, p_max: float):
    deg = max(degree, cfg.max_degree or 0, 1)
    return build_grid(spec, deg, cfg.radial_order, cfg.angular_order, tol=cfg.grid_tol, p_max=p_max)


# subcommands ---------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _config(args)
    if cfg.kernel is None:
        raise ConfigError("kernel: required")
    spec = cfg.spec
    e = Exponents(cfg.p)
    k = read_poly(cfg.kernel)
    grid = _grid(cfg, spec, max(cfg.degree, k.degree), max(e.p, 2.0))
    if cfg.p == 2.0 and args.method == "auto":
        sol = solve_p2(k, cfg.degree, spec, grid)
    else:
        method = "newton" if args.method == "auto" else args.method
        sol = solve(k, cfg.degree, e, spec, grid,
                    SolveOptions(tol=cfg.tol or 1e-8, max_iter=args.max_iter, method=method))
    report = {"weight": spec.label(), **sol.to_dict()}
    _emit(dumps(report), cfg.out)
    return 0 if sol.converged else 1


def cmd_verify(args) -> int:
    kernels = args.kernel or []
    ps = args.p or [2.0]
    cfg = _config(args, tol=1e-6 if args.kind != "base-identity" else 1e-8)
    spec = cfg.spec
    if args.kind == "base-identity":
        if not args.f:
            raise ConfigError("f: required for base-identity")
        polys = [read_poly(path) for path in args.f]
        cases = [(f, p) for f in polys for p in ps]
        reports = _map(lambda c: regularity.verify_base_identity(c[0], c[1], spec, tol=cfg.tol), cases)
    else:
        if not kernels:
            raise ConfigError("kernel: required")
        ks = [read_poly(path) for path in kernels]
        exps = [Exponents(p) for p in ps]
        pmax = max(max(e.p, e.q) for e in exps)
        grid = _grid(cfg, spec, max([cfg.degree] + [k.degree for k in ks]), pmax)
        opts = SolveOptions(tol=args.solver_tol)
        fn = regularity.verify_disc_bound if args.kind == "disc" else regularity.verify_plane_bound
        cases = [(k, e) for k in ks for e in exps]
        reports = _map(lambda c: fn(c[0], c[1], spec, grid, cfg.degree, cfg.tol, opts), cases)
    _emit(dumps(reports), cfg.out)
    return 0 if all(r.passed for r in reports) else 1


def cmd_means(args) -> int:
    cfg = _config(args)
    spec = cfg.spec
    f = read_poly(args.f)
    r = np.linspace(args.r_min, args.r_max, args.count)
    grid = _grid(cfg, spec, f.degree, max(cfg.p, 2.0))
    _emit(means_profile(f, cfg.p, spec, grid, r).to_csv(), cfg.out)
    return 0


def cmd_logconvex(args) -> int:
    kind = args.kind
    if kind == "gamma":
        rep = logconvex.gamma_ratio_check(args.x or [10.0, 20.0, 40.0, 80.0])
        _emit(csv_table(["x", "ratio"], rep.rows), args.out)
        return 0 if rep.passed else 1
    cfg = _config(args)
    spec = cfg.spec
    if kind == "s-integral":
        gauge = logconvex.gauge_from_weight(spec)
        xs = args.x0 or [1.0]
        rows = _map(lambda x: (x, logconvex.S_integral(gauge, x, cfg.tol or 1e-13)), xs)
        _emit(csv_table(["x0", "S"], rows), cfg.out)
        return 0 if all(math.isfinite(s) for _, s in rows) else 1
    if not args.f:
        raise ConfigError("f: required")
    f = read_poly(args.f)
    if kind == "decay":
        rep = logconvex.decay_check(f, cfg.p, spec)
        _emit(rep.to_csv(), cfg.out)
        sys.stderr.write(json.dumps(logconvex_summary(rep)) + "\n")
        return 0 if rep.passed else 1
    r = np.geomspace(args.r_min, args.r_max, args.count)
    rep = logconvex.logconvexity_check(f, cfg.p, r, cfg.tol or 1e-8)
    _emit(dumps(rep), cfg.out)
    return 0 if rep.passed else 1


def logconvex_summary(rep) -> dict:
    return {"pass": rep.passed, "r_peak": rep.r_peak, "final_ratio": rep.final_ratio,
            "tail_monotone": rep.tail_monotone, "C": rep.C}


def cmd_density(args) -> int:
    ps = args.p or [2.0]
    if args.kind == "fock":
        alphas = args.alpha or [1.0]
        cases = [(a, p) for a in alphas for p in ps]
        reports = _map(lambda c: density.fock_density_certificate(c[0], Exponents(c[1]), args.rho, args.beta,
                                                                  args.tol or 1e-10), cases)
        _emit(dumps(reports), args.out)
        return 0 if all(r.finite for r in reports) else 1
    cfg = _config(args)
    spec = cfg.spec
    reports = [density.check_plane_density(spec, Exponents(p), args.rho, args.beta, cfg.tol or 1e-10)
               for p in ps]
    _emit(dumps(reports), cfg.out)
    return 0 if all(r.finite for r in reports) else 1


def cmd_convergence(args) -> int:
    cfg = _config(args)
    if cfg.kernel is None:
        raise ConfigError("kernel: required")
    spec = cfg.spec
    e = Exponents(cfg.p)
    k = read_poly(cfg.kernel)
    opts = SolveOptions(tol=args.solver_tol)
    if args.kind == "subspace":
        degrees = args.degrees or [2, 4, 6, 8]
        grid = _grid(cfg, spec, max(degrees + [k.degree]), max(e.p, 2.0))
        rep = subspace_convergence(k, e, spec, grid, degrees, opts)
        _emit(dumps(rep), cfg.out)
        return 0 if rep.monotone and rep.distances_decreasing else 1
    if not args.direction:
        raise ConfigError("direction: required")
    h = read_poly(args.direction)
    grid = _grid(cfg, spec, max(cfg.degree, k.degree, h.degree), max(e.p, 2.0))
    rows = kernel_continuity_probe(k, h, args.deltas or [1e-1, 1e-2, 1e-3], e, spec, grid, cfg.degree, opts)
    _emit(dumps({"rows": rows}), cfg.out)
    return 0


# parser --------------------------------------------------------------------

def _common(sp, p_multi: bool = False):
    sp.add_argument("--weight", required=False, default=None,
                    help="weight family, e.g. fock:alpha=1, affine:a=2,b=1,R=1, power:beta=2,R=1")
    if p_multi:
        sp.add_argument("--p", type=float, nargs="+", default=None, help="exponent(s) (default 2)")
    else:
        sp.add_argument("--p", type=float, default=None, help="exponent (default 2)")
    sp.add_argument("--tol", type=float, default=None, help="tolerance of the command's main check")
    sp.add_argument("--grid-tol", type=float, default=None, help="plane truncation tolerance (default 1e-12)")
    sp.add_argument("--radial-order", type=int, default=None, help="Gauss points per radial panel")
    sp.add_argument("--angular-order", type=int, default=None, help="equispaced angular nodes")
    sp.add_argument("--max-degree", type=int, default=None, help="size the grid for polynomials up to this degree")
    sp.add_argument("--config", default=None, help="RunConfig JSON; flags override it")
    sp.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bergfock", description=__doc__.splitlines()[0],
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="extremal polynomial of degree <= n")
    _common(sp)
    sp.add_argument("--degree", type=int, default=None, help="search degree n (default 8)")
    sp.add_argument("--kernel", default=None, help="kernel polynomial JSON")
    sp.add_argument("--method", choices=["auto", "newton", "gradient"], default="auto")
    sp.add_argument("--max-iter", type=int, default=10_000)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="regularity bounds and the base identity")
    sp.add_argument("kind", choices=["disc", "plane", "base-identity"])
    _common(sp, p_multi=True)
    sp.add_argument("--degree", type=int, default=None, help="search degree n (default 8)")
    sp.add_argument("--kernel", nargs="+", default=None, help="kernel polynomial JSON file(s)")
    sp.add_argument("--f", nargs="+", default=None, help="polynomial JSON file(s) for base-identity")
    sp.add_argument("--solver-tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("means", help="CSV profile r, Mp, Dp, Np")
    _common(sp)
    sp.add_argument("--f", required=True, help="polynomial JSON")
    sp.add_argument("--r-min", type=float, default=0.1)
    sp.add_argument("--r-max", type=float, default=1.0)
    sp.add_argument("--count", type=int, default=10)
    sp.set_defaults(func=cmd_means)

    sp = sub.add_parser("logconvex", help="S integral, decay, convexity, gamma ratio")
    sp.add_argument("kind", choices=["s-integral", "decay", "convexity", "gamma"])
    _common(sp)
    sp.add_argument("--x0", type=_floats, default=None, help="comma-separated x0 values")
    sp.add_argument("--x", type=_floats, default=None, help="comma-separated x values (gamma)")
    sp.add_argument("--f", default=None, help="polynomial JSON")
    sp.add_argument("--r-min", type=float, default=0.05)
    sp.add_argument("--r-max", type=float, default=10.0)
    sp.add_argument("--count", type=int, default=80)
    sp.set_defaults(func=cmd_logconvex)

    sp = sub.add_parser("density", help="integrability conditions for polynomial density")
    sp.add_argument("kind", choices=["check", "fock"])
    _common(sp, p_multi=True)
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--beta", type=float, default=0.75)
    sp.add_argument("--alpha", type=float, nargs="+", default=None, help="alpha value(s) for 'fock'")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("convergence", help="degree and kernel stability studies")
    sp.add_argument("kind", choices=["subspace", "kernel"])
    _common(sp)
    sp.add_argument("--degree", type=int, default=None, help="search degree for 'kernel' (default 8)")
    sp.add_argument("--degrees", type=_ints, default=None, help="comma-separated degrees for 'subspace'")
    sp.add_argument("--kernel", default=None, help="kernel polynomial JSON")
    sp.add_argument("--direction", default=None, help="perturbation polynomial JSON for 'kernel'")
    sp.add_argument("--deltas", type=_floats, default=None)
    sp.add_argument("--solver-tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_convergence)
    return ap


def _usage_error(parser, msg: str) -> int:
    sys.stderr.write(parser.format_usage())
    sys.stderr.write(f"bergfock: error: {msg}\n")
    return 2


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    needs_weight = not (args.command == "logconvex" and args.kind == "gamma") and \
        not (args.command == "density" and args.kind == "fock")
    if needs_weight and args.weight is None and not args.config:
        return _usage_error(parser, "the following arguments are required: --weight")
    try:
        return args.func(args)
    except ConfigError as exc:
        return _usage_error(parser, str(exc))
    except (ValueError, OSError, WeightDomainError, InvalidOrderError, NonConvergentTailError,
            ZeroKernelError) as exc:
        sys.stderr.write(f"bergfock: error: {exc}\n".replace("\n", " ").rstrip() + "\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
