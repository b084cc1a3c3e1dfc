"""Radial weights w on [0, R^2) and the quantities derived from them.

A weight enters the norm as nu(z) = w(|z|^2).  Named families have closed
forms for w and w'; custom weights supply their own evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

FAMILIES = ("fock", "affine", "power", "custom")


class WeightDomainError(ValueError):
    """Raised when a weight is evaluated outside [0, R^2]."""


@dataclass(frozen=True)
class WeightSpec:
    """A radial weight family on [0, R^2).

    ``params`` holds the family parameters (``alpha`` for fock, ``a``/``b``
    for affine, ``beta`` for power).  For ``custom`` weights ``w`` and
    ``w_prime`` are vectorised callables of x = |z|^2 and ``boundary`` is
    the left limit of w at R^2 (ignored on the plane).
    """

    family: str
    radius: float = math.inf
    params: dict = field(default_factory=dict)
    w: Callable | None = field(default=None, compare=False, repr=False)
    w_prime: Callable | None = field(default=None, compare=False, repr=False)
    boundary: float | None = None
    name: str | None = None
    validated: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.family == "fock":
            if not math.isinf(self.radius):
                raise ValueError("fock weights live on the plane (R = inf)")
            if not self.params.get("alpha", 0) > 0:
                raise ValueError("fock weight needs alpha > 0")
        elif self.family == "affine":
            a, b = self.params.get("a"), self.params.get("b")
            if a is None or b is None or math.isinf(self.radius):
                raise ValueError("affine weight needs a, b and a finite R")
            bound = b * self.radius**2
            if not ((a > bound >= 0) or (a >= bound > 0)):
                raise ValueError(f"affine weight needs a > bR^2 >= 0 or a >= bR^2 > 0 (a={a}, b={b})")
        elif self.family == "power":
            if self.params.get("beta", -1) < 0 or math.isinf(self.radius):
                raise ValueError("power weight needs beta >= 0 and a finite R")
        elif self.w is None or self.w_prime is None:
            raise ValueError("custom weight needs both w and w_prime evaluators")

    @property
    def is_plane(self) -> bool:
        return math.isinf(self.radius)

    def label(self) -> str:
        if self.name:
            return self.name
        if self.family == "fock":
            return f"fock:alpha={self.params['alpha']:g}"
        if self.family == "affine":
            return f"affine:a={self.params['a']:g},b={self.params['b']:g},R={self.radius:g}"
        if self.family == "power":
            return f"power:beta={self.params['beta']:g},R={self.radius:g}"
        return "custom"

    # raw evaluators, no domain checks
    def _w(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "fock":
            a = self.params["alpha"]
            return np.exp(-a * x) / a
        if self.family == "affine":
            return self.params["a"] - self.params["b"] * x
        if self.family == "power":
            return np.clip(1.0 - x / self.radius**2, 0.0, None) ** self.params["beta"]
        return np.asarray(self.w(x), dtype=float)

    def _w_prime(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "fock":
            return -np.exp(-self.params["alpha"] * x)
        if self.family == "affine":
            return np.full_like(x, -self.params["b"])
        if self.family == "power":
            beta, r2 = self.params["beta"], self.radius**2
            if beta == 0:
                return np.zeros_like(x)
            with np.errstate(divide="ignore"):
                return -beta / r2 * np.clip(1.0 - x / r2, 0.0, None) ** (beta - 1.0)
        return np.asarray(self.w_prime(x), dtype=float)

    def log_w(self, x):
        """log w(x), exact for fock so it never underflows."""
        x = np.asarray(x, dtype=float)
        if self.family == "fock":
            a = self.params["alpha"]
            return -a * x - math.log(a)
        with np.errstate(divide="ignore"):
            return np.log(self._w(x))

    def boundary_value(self) -> float:
        """w(R^2) as a left limit; 0 on the plane."""
        if self.is_plane:
            return 0.0
        if self.family == "custom":
            if self.boundary is None:
                raise ValueError("custom disc weight must supply its boundary value w(R^2)")
            return float(self.boundary)
        return float(self._w(self.radius**2))


def _check_domain(spec: WeightSpec, x, allow_boundary=False):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise WeightDomainError(f"x must be >= 0, got {x.min()}")
    if not spec.is_plane:
        r2 = spec.radius**2
        bad = x > r2 if allow_boundary else x >= r2
        if np.any(bad):
            raise WeightDomainError(f"x must lie in [0, R^2) = [0, {r2:g})")
    return x


def _out(x, val):
    return float(val) if np.ndim(x) == 0 else val


def eval_w(spec: WeightSpec, x, allow_boundary=False):
    """w(x) for x in [0, R^2)."""
    xs = _check_domain(spec, x, allow_boundary)
    if allow_boundary and not spec.is_plane and spec.family == "custom":
        val = np.where(xs >= spec.radius**2, spec.boundary_value(), spec._w(np.minimum(xs, np.nextafter(spec.radius**2, 0))))
        return _out(x, val)
    return _out(x, spec._w(xs))


def eval_w_prime(spec: WeightSpec, x, allow_boundary=False):
    """w'(x) for x in [0, R^2); non-positive for valid weights."""
    xs = _check_domain(spec, x, allow_boundary)
    return _out(x, spec._w_prime(xs))


def lambda_of(spec: WeightSpec, x):
    """The growth gauge lambda(x) = -1/w'(x^2) on the plane."""
    if not spec.is_plane:
        raise WeightDomainError("lambda is only defined for plane weights")
    wp = eval_w_prime(spec, np.asarray(x, dtype=float) ** 2)
    if np.any(np.asarray(wp) == 0):
        raise ZeroDivisionError("w'(x^2) = 0, lambda undefined")
    return -1.0 / wp


def log_lambda_of(spec: WeightSpec, x):
    """log lambda(x), computed without overflow for fock weights."""
    x = np.asarray(x, dtype=float)
    if spec.family == "fock":
        return _out(x, spec.params["alpha"] * x**2)
    wp = spec._w_prime(x**2)
    if np.any(wp >= 0):
        raise ZeroDivisionError("w'(x^2) = 0, lambda undefined")
    return _out(x, -np.log(-wp))


@dataclass
class WeightDiagnostics:
    passed: bool
    spec: WeightSpec
    positivity_violations: list = field(default_factory=list)
    monotonicity_violations: list = field(default_factory=list)
    constant: bool = False
    tail_max: dict = field(default_factory=dict)
    failed: list = field(default_factory=list)


def default_r_grid(spec: WeightSpec, n: int = 512) -> np.ndarray:
    if spec.is_plane:
        return np.geomspace(1.0, 100.0, n)
    return np.linspace(0.0, spec.radius, n, endpoint=False)


def validate(spec: WeightSpec, n_check: int = 8, r_grid=None,
             tail_tol: float = 1e-10) -> WeightDiagnostics:
    """Sample-based structural check.  Never raises on a bad weight.

    Positivity and monotonicity are checked on ``r_grid`` (x = r^2) plus a
    uniform x-grid; on the plane, r^n w(r^2) and r^n w'(r^2) must be
    decreasing over the last quarter of the grid and fall below
    ``tail_tol`` times their maximum.  A zero w on the plane is accepted
    only as underflow (no positive sample beyond it).
    """
    if n_check < 1:
        raise ValueError("n_check must be >= 1")
    r = default_r_grid(spec) if r_grid is None else np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r) <= 0):
        raise ValueError("r_grid must be increasing")
    diag = WeightDiagnostics(passed=False, spec=spec)
    if spec.is_plane:
        xs = np.union1d(np.linspace(0.0, r[-1] ** 2, 512), r**2)
    else:
        xs = np.union1d(np.linspace(0.0, spec.radius**2, 512, endpoint=False), r**2)
        xs = xs[xs < spec.radius**2]
    try:
        with np.errstate(all="ignore"):
            w = spec._w(xs)
            wp = spec._w_prime(xs)
    except Exception as exc:  # evaluator failure is a diagnostic, not a crash
        diag.failed.append(f"evaluation: {exc}")
        return diag

    bad = ~np.isfinite(w) | (w < 0)
    zero = w == 0
    if np.any(zero):
        if spec.is_plane:
            first = np.argmax(zero)
            bad |= zero & (np.arange(w.size) < first)
            if np.any(w[first:] > 0):
                bad[first] = True
        else:
            bad |= zero
    if np.any(bad):
        diag.positivity_violations = xs[bad].tolist()[:10]
        diag.failed.append("positivity")

    scale = np.max(np.abs(w[np.isfinite(w)]), initial=1.0)
    incr = (wp > 1e-12 * scale) | (np.diff(w, prepend=w[0]) > 1e-12 * scale)
    if np.any(incr):
        diag.monotonicity_violations = xs[incr].tolist()[:10]
        diag.failed.append("monotonicity")
    if not np.any(wp < 0):
        diag.constant = True
        diag.failed.append("non-constant")

    if spec.is_plane:
        tail = r[len(r) - max(len(r) // 4, 2):]
        for n in range(1, n_check + 1):
            with np.errstate(all="ignore"):
                vals = np.abs(tail**n * spec._w(tail**2))
                dvals = np.abs(tail**n * spec._w_prime(tail**2))
                full = np.abs(r**n * spec._w(r**2))
            peak = np.max(full[np.isfinite(full)], initial=0.0)
            diag.tail_max[n] = float(np.max(vals)) if np.all(np.isfinite(vals)) else math.inf
            ok = (np.all(np.isfinite(vals)) and np.all(np.diff(vals) <= 1e-300 + 1e-12 * peak)
                  and vals[-1] <= tail_tol * max(peak, 1e-300)
                  and np.all(np.isfinite(dvals)) and dvals[-1] <= tail_tol * max(np.max(dvals), 1e-300))
            if not ok:
                diag.failed.append(f"decay n={n}")
    diag.passed = not diag.failed
    diag.spec = replace(spec, validated=diag.passed)
    return diag


def parse_weight(text: str) -> WeightSpec:
    """Parse ``fock:alpha=1``, ``affine:a=2,b=1,R=1`` or ``power:beta=2,R=1``."""
    family, _, rest = text.strip().partition(":")
    family = family.strip().lower()
    if family not in ("fock", "affine", "power"):
        raise ValueError(f"weight: unknown family {family!r}")
    kv = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"weight: malformed parameter {item!r}")
        try:
            kv[key.strip()] = float(val)
        except ValueError:
            raise ValueError(f"weight.{key.strip()}: not a number: {val!r}") from None
    allowed = {"fock": {"alpha"}, "affine": {"a", "b", "R"}, "power": {"beta", "R"}}[family]
    for key in kv:
        if key not in allowed:
            raise ValueError(f"weight.{key}: not a parameter of {family}")
    radius = kv.pop("R", math.inf if family == "fock" else None)
    if radius is None:
        raise ValueError(f"weight.R: required for {family}")
    for key in allowed - {"R"}:
        if key not in kv:
            raise ValueError(f"weight.{key}: required for {family}")
    return WeightSpec(family, radius=radius, params=kv)


def format_weight(spec: WeightSpec) -> str:
    if spec.family == "custom":
        raise ValueError("custom weights have no string form")
    return spec.label()


def fock(alpha: float = 1.0) -> WeightSpec:
    return WeightSpec("fock", params={"alpha": float(alpha)})


def affine_disc(a: float, b: float, radius: float = 1.0) -> WeightSpec:
    return WeightSpec("affine", radius=float(radius), params={"a": float(a), "b": float(b)})


def power_disc(beta: float, radius: float = 1.0) -> WeightSpec:
    return WeightSpec("power", radius=float(radius), params={"beta": float(beta)})


def custom(w, w_prime, radius: float = math.inf, boundary=None, name=None) -> WeightSpec:
    return WeightSpec("custom", radius=radius, w=w, w_prime=w_prime, boundary=boundary, name=name)
