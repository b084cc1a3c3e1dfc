"""Growth gauges, the tangent-comparison integral S(x0, lambda), and the
decay of r^3 M_p^p(r, f) w(r^2) on the plane.

All gauges are handled through log(lambda) so Gaussian gauges like
exp(alpha x^2) never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .quadrature import QuadGrid, build_grid
from .space import Dp_pp, Poly, integral_mean_pp
from .weights import WeightSpec, log_lambda_of

DIVERGENT = math.inf


@dataclass(frozen=True)
class GrowthGauge:
    """A positive increasing lambda on [x_min, inf) given by log(lambda)."""

    log_lam: Callable[[float], float]
    dlog_lam: Callable[[float], float] | None = None
    x_min: float = 0.0
    name: str = "gauge"

    def log_derivative(self, x: float) -> float:
        """d log(lambda)/dx; central differences when no derivative was given."""
        if self.dlog_lam is not None:
            return float(self.dlog_lam(x))
        h = 1e-5 * max(1.0, abs(x))
        return (float(self.log_lam(x + h)) - float(self.log_lam(x - h))) / (2.0 * h)

    def scaled(self, c: float) -> "GrowthGauge":
        """The gauge c * lambda."""
        if c <= 0:
            raise ValueError("scale must be positive")
        shift = math.log(c)
        base = self.log_lam
        return GrowthGauge(lambda x: base(x) + shift, self.dlog_lam, self.x_min, f"{c:g}*{self.name}")

    def __call__(self, x):
        return np.exp(self.log_lam(x))


def gauge_from_weight(spec: WeightSpec) -> GrowthGauge:
    """lambda(x) = -1/w'(x^2); exact derivative for fock weights."""
    if not spec.is_plane:
        raise ValueError("growth gauges come from plane weights")
    if spec.family == "fock":
        a = spec.params["alpha"]
        return GrowthGauge(lambda x: a * x * x, lambda x: 2.0 * a * x, 0.0, f"exp({a:g}x^2)")
    return GrowthGauge(lambda x: float(log_lambda_of(spec, x)), None, 0.0, spec.label())


def gaussian_gauge(alpha: float = 1.0) -> GrowthGauge:
    return GrowthGauge(lambda x: alpha * x * x, lambda x: 2.0 * alpha * x, 0.0, f"exp({alpha:g}x^2)")


def power_gauge(a: float = 1.0) -> GrowthGauge:
    return GrowthGauge(lambda x: a * math.log(x), lambda x: a / x, 0.0, f"x^{a:g}")


def S_integral(gauge: GrowthGauge, x0: float, tol: float = 1e-13, max_panels: int = 80) -> float:
    """S(x0, lambda) = int_x0^inf (lambda(x0)/lambda(x)) (x/x0)^(x0 lambda'(x0)/lambda(x0)) dx.

    Integrated over panels of doubling length; returns ``DIVERGENT`` (inf)
    when the increments stop shrinking.
    """
    if x0 <= 0:
        raise ValueError("x0 must be positive")
    L0 = float(gauge.log_lam(x0))
    slope = x0 * gauge.log_derivative(x0)
    lx0 = math.log(x0)

    def integrand(x):
        return math.exp(L0 - float(gauge.log_lam(x)) + slope * (math.log(x) - lx0))

    h = 0.25 * x0
    a = x0
    total = 0.0
    prev = None
    growth = 0
    for _ in range(max_panels):
        b = a + h
        inc, _ = integrate.quad(integrand, a, b, limit=200, epsabs=0.0, epsrel=1e-13)
        if not math.isfinite(inc):
            return DIVERGENT
        total += inc
        if prev is not None:
            if inc >= 0.5 * prev:
                growth += 1
                if growth >= 8:
                    return DIVERGENT
            else:
                growth = 0
            if inc <= tol * total and inc <= 0.5 * prev:
                return total
        prev = inc
        a, h = b, 2.0 * h
    return DIVERGENT


@dataclass
class LiminfReport:
    rows: list
    estimate: float
    minimum: float
    positive: bool


def liminf_probe(gauge: GrowthGauge, x0_grid, tol: float = 1e-13) -> LiminfReport:
    """S on a grid of x0; the liminf estimate is the minimum over the last half."""
    xs = np.asarray(x0_grid, dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise ValueError("x0 grid must be increasing")
    rows = [(float(x), S_integral(gauge, float(x), tol)) for x in xs]
    vals = np.array([s for _, s in rows])
    tail = vals[len(vals) // 2:]
    est = float(np.min(tail))
    return LiminfReport(rows, est, float(np.min(vals)), bool(est > 0))


def _log_neg_w_prime(spec: WeightSpec, x):
    x = np.asarray(x, dtype=float)
    if spec.family == "fock":
        return -spec.params["alpha"] * x
    with np.errstate(divide="ignore"):
        return np.log(-spec._w_prime(x))


@dataclass
class DecayReport:
    passed: bool
    preconditions: dict
    r: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    peak: float = 0.0
    r_peak: float = 0.0
    final_ratio: float = 0.0
    tail_monotone: bool = True
    C: float = 0.0
    notes: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["r,g"] + [f"{a:.17g},{b:.17g}" for a, b in zip(self.r, self.g)]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"pass": self.passed, "preconditions": self.preconditions, "peak": self.peak,
                "r_peak": self.r_peak, "final_ratio": self.final_ratio,
                "tail_monotone": self.tail_monotone, "C": self.C, "notes": self.notes}


def _log_means(f: Poly, p: float, r: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.array([integral_mean_pp(f, p, x) for x in r]))


def decay_check(f: Poly, p: float, spec: WeightSpec, grid: QuadGrid | None = None, r_grid=None,
                x0_grid=None, final_tol: float = 1e-6, liminf_floor: float = 0.0) -> DecayReport:
    """g(r) = r^3 M_p^p(r, f) w(r^2) must decrease past its peak and end below
    ``final_tol`` times the peak.

    Preconditions (finite D_p(inf, f), positive liminf of S for the weight's
    gauge, above ``liminf_floor``; -w' >= C w on the tail) are checked
    first; a failure is reported, not raised.
    """
    if not spec.is_plane:
        raise ValueError("decay_check is for plane weights")
    if grid is None:
        grid = build_grid(spec, max(f.degree, 1), p_max=max(p, 2.0))
    if r_grid is None:
        r_grid = np.geomspace(0.05, max(12.0, 1.5 * grid.R_eff), 600)
    r = np.asarray(r_grid, dtype=float)
    pre = {}
    notes = []

    dpp = Dp_pp(f, p, spec, grid)
    pre["Dp_finite"] = bool(math.isfinite(dpp))
    probe = liminf_probe(gauge_from_weight(spec),
                         np.geomspace(1.0, 10.0, 10) if x0_grid is None else x0_grid)
    pre["liminf_S"] = probe.estimate
    pre["liminf_positive"] = bool(probe.estimate > liminf_floor)
    tail_r = r[len(r) // 2:]
    log_ratio = _log_neg_w_prime(spec, tail_r**2) - spec.log_w(tail_r**2)
    C = float(np.exp(np.min(log_ratio)))
    pre["C"] = C
    pre["C_positive"] = bool(C > 0)
    ok_pre = pre["Dp_finite"] and pre["liminf_positive"] and pre["C_positive"]

    if f.is_zero():
        g = np.zeros_like(r)
        notes.append("f = 0: g vanishes identically")
        return DecayReport(ok_pre, pre, r, g, 0.0, float(r[0]), 0.0, True, C, notes)

    log_g = 3.0 * np.log(r) + _log_means(f, p, r) + spec.log_w(r**2)
    i_peak = int(np.argmax(log_g))
    tail = log_g[i_peak:]
    monotone = bool(np.all(np.diff(tail) <= 1e-12))
    final_ratio = float(np.exp(log_g[-1] - log_g[i_peak]))
    g = np.exp(log_g)
    if not ok_pre:
        notes.append("precondition failed")
    passed = ok_pre and monotone and final_ratio < final_tol
    return DecayReport(passed, pre, r, g, float(g[i_peak]), float(r[i_peak]), final_ratio,
                       monotone, C, notes)


def integrability_limit_check(f: Poly, p: float, spec: WeightSpec, r_grid) -> dict:
    """int g/lambda over the grid and the last-point value of g/lambda
    relative to its peak, with g = r^3 M_p^p and lambda = -1/w'(r^2)."""
    r = np.asarray(r_grid, dtype=float)
    log_q = 3.0 * np.log(r) + _log_means(f, p, r) + _log_neg_w_prime(spec, r**2)
    q = np.exp(log_q)
    total = float(integrate.trapezoid(q, r))
    return {"integral": total, "finite": bool(math.isfinite(total)),
            "tail_ratio": float(np.exp(log_q[-1] - np.max(log_q)))}


def _second_differences(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    h1 = np.diff(X)[:-1]
    h2 = np.diff(X)[1:]
    d1 = Y[1:-1] - Y[:-2]
    d2 = Y[2:] - Y[1:-1]
    # equals y[i+1] - 2y[i] + y[i-1] on a uniform grid
    return 2.0 * (h1 * d2 - h2 * d1) / (h1 + h2)


@dataclass
class ConvexityReport:
    passed: bool
    min_second_difference_logM: float
    min_second_difference_logg: float
    skipped: int


def logconvexity_check(f: Poly, p: float, r_grid, tol: float = 1e-8) -> ConvexityReport:
    """log M_p(e^X, f) and log(e^{3X} M_p^p(e^X, f)) must be convex in X = log r."""
    r = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r) <= 0) or np.any(r <= 0):
        raise ValueError("r grid must be positive and increasing")
    logM = _log_means(f, p, r) / p
    keep = np.isfinite(logM)
    X = np.log(r[keep])
    ym = logM[keep]
    if X.size < 3:
        return ConvexityReport(True, 0.0, 0.0, int((~keep).sum()))
    sm = _second_differences(X, ym)
    sg = _second_differences(X, 3.0 * X + p * ym)
    return ConvexityReport(bool(sm.min() >= -tol and sg.min() >= -tol), float(sm.min()), float(sg.min()),
                           int((~keep).sum()))


def log_upper_gamma(a: float, x: float) -> float:
    """log Gamma(a, x), the upper incomplete gamma function.

    Integer a: Gamma(a, x) = (a-1)! e^{-x} sum_{k<a} x^k / k!.
    Otherwise: Gamma(a, x) = x^(a-1) e^{-x} int_0^inf (1 + u/x)^(a-1) e^{-u} du.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if float(a).is_integer() and a >= 1:
        n = int(a)
        k = np.arange(n)
        terms = k * math.log(x) - np.array([math.lgamma(j + 1.0) for j in k])
        top = terms.max()
        return math.lgamma(n) - x + top + math.log(np.sum(np.exp(terms - top)))
    am1 = a - 1.0
    val, _ = integrate.quad(lambda u: math.exp(am1 * math.log1p(u / x) - u), 0.0, math.inf,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return am1 * math.log(x) - x + math.log(val)


def upper_gamma(a: float, x: float) -> float:
    return math.exp(log_upper_gamma(a, x))


def gamma_ratio(x: float) -> float:
    """Gamma(x, x) / (x^x e^{-x} x^{-1/2} sqrt(pi/2))."""
    return math.exp(log_upper_gamma(x, x) - (x * math.log(x) - x - 0.5 * math.log(x))
                    - 0.5 * math.log(math.pi / 2.0))


@dataclass
class GammaReport:
    rows: list
    increasing: bool
    in_band: bool

    @property
    def passed(self) -> bool:
        return self.increasing and self.in_band


def gamma_ratio_check(x_grid) -> GammaReport:
    xs = np.asarray(x_grid, dtype=float)
    if np.any(xs <= 0) or np.any(np.diff(xs) <= 0):
        raise ValueError("x grid must be positive and increasing")
    rows = [(float(x), gamma_ratio(float(x))) for x in xs]
    vals = np.array([v for _, v in rows])
    inc = bool(np.all(np.diff(vals) > 0))
    band = bool(all(0.9 < v < 1.0 for x, v in rows if x >= 10))
    return GammaReport(rows, inc, band)


def fock_S_closed_form(alpha: float, x0: float) -> float:
    """S(x0, exp(alpha x^2)) through the incomplete gamma representation
    (1/(2 sqrt(alpha))) e^a a^(-a) Gamma(a + 1/2, a), a = alpha x0^2."""
    a = alpha * x0 * x0
    return math.exp(a - a * math.log(a) + log_upper_gamma(a + 0.5, a)) / (2.0 * math.sqrt(alpha))
