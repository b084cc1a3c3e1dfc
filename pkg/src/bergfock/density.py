"""Numerical evidence for polynomial density: point-evaluation bounds,
dilations, and the two integrability conditions on the plane.

A "finite" integral here means the doubling-panel tail test passed; it is
a certificate of numerical convergence, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .quadrature import QuadGrid, build_grid, build_plane_grid
from .space import Exponents, Poly, dilate, norm
from .weights import WeightDomainError, WeightSpec, fock


def _p(e) -> float:
    return e.p if isinstance(e, Exponents) else float(e)


@dataclass
class DensityReport:
    condition: str
    integrals: dict
    finite: bool
    params: dict
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"condition": self.condition, "finite": self.finite, "params": self.params,
                "integrals": self.integrals, "notes": self.notes}


def _min_nu(spec: WeightSpec, lo: float, hi: float, samples: int = 257) -> float:
    """inf of nu(r) = w(r^2) over [lo, hi]."""
    r = np.linspace(lo, hi, samples)
    vals = np.exp(spec.log_w(r * r))
    return float(min(vals.min(), np.exp(spec.log_w(hi * hi))))


def point_eval_bound(spec: WeightSpec, z: complex, e, tight: bool = False) -> float:
    """Upper bound for |f(z)| over unit-norm f, from the sub-mean-value property.

    Plane: pi^(1/p) nu(|z|+1)^(-1/p); with ``tight`` the constant is
    pi^(-1/p), which is what averaging over the unit disc around z gives.
    Disc: (m_z pi r'^2)^(-1/p), r' = (R - |z|)/2, m_z = inf of nu on D(z, r').
    """
    p = _p(e)
    a = abs(complex(z))
    if spec.is_plane:
        m = _min_nu(spec, max(0.0, a - 1.0), a + 1.0)
        c = math.pi ** (-1.0 / p) if tight else math.pi ** (1.0 / p)
        return c * m ** (-1.0 / p)
    R = spec.radius
    if a >= R:
        raise WeightDomainError(f"|z| = {a} must be < R = {R}")
    rp = 0.5 * (R - a)
    m = _min_nu(spec, max(0.0, a - rp), a + rp)
    return (m * math.pi * rp * rp) ** (-1.0 / p)


def dilation_convergence(f: Poly, spec: WeightSpec, e, rho_list, grid: QuadGrid | None = None) -> dict:
    """Rows (rho, ||f - f_rho||, ||f_rho||); distances should fall to 0 as rho -> 1."""
    p = _p(e)
    rhos = [float(x) for x in rho_list]
    if any(not 0 < x <= 1 for x in rhos):
        raise ValueError("rho values must lie in (0, 1]")
    if grid is None:
        grid = build_grid(spec, max(f.degree, 1), p_max=max(p, 2.0))
    base = norm(f, p, spec, grid)
    rows = []
    for rho in rhos:
        fr = dilate(f, rho)
        d = 0.0 if rho == 1.0 else norm(f - fr, p, spec, grid)
        rows.append({"rho": rho, "distance": d, "norm": norm(fr, p, spec, grid)})
    order = np.argsort(rhos)
    dist = [rows[i]["distance"] for i in order]
    return {
        "rows": rows,
        "norm": base,
        "monotone": all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(dist, dist[1:])),
        "contractive": all(r["norm"] <= base * (1 + 1e-12) for r in rows),
    }


def radial_tail_integral(log_integrand: Callable[[float], float], tol: float = 1e-10,
                         first: float = 1.0, max_panels: int = 48) -> dict:
    """2 pi int_0^inf r exp(log_integrand(r)) dr over [0, first], then doubling panels.

    Converged when an increment is below ``tol`` times the total and at most
    half the previous one; growing increments or overflow mean divergence.
    """
    def h(r):
        v = log_integrand(r)
        return 2.0 * math.pi * r * math.exp(v) if v < 700 else math.inf

    edges = [0.0, first]
    total = 0.0
    prev = None
    growth = 0
    for i in range(max_panels):
        a, b = edges[-2], edges[-1]
        try:
            inc, _ = integrate.quad(h, a, b, limit=200, epsabs=0.0, epsrel=1e-12)
        except (OverflowError, ValueError):
            inc = math.inf
        if not math.isfinite(inc):
            return {"value": math.inf, "finite": False, "panels": i + 1, "last_increment": math.inf,
                    "ratio": math.inf, "R_tail": b}
        total += inc
        ratio = inc / prev if prev else math.inf
        if prev is not None:
            growth = growth + 1 if inc >= prev else 0
            if growth >= 8:
                return {"value": math.inf, "finite": False, "panels": i + 1, "last_increment": inc,
                        "ratio": ratio, "R_tail": b}
            if inc <= tol * total and ratio < 0.5:
                return {"value": total, "finite": True, "panels": i + 1, "last_increment": inc,
                        "ratio": ratio, "R_tail": b}
        prev = inc
        edges.append(2.0 * b)
    return {"value": total, "finite": False, "panels": max_panels, "last_increment": prev,
            "ratio": math.nan, "R_tail": edges[-1]}


def _density_integrals(log_nu: Callable[[float], float], p: float, rho: float, beta: float, tol: float):
    # mu = nu^(2 beta / p); first integrand nu(rho r + 1)^(-2/p) mu(r), second nu(r + 1)^(-beta) nu(r)
    def l1(r):
        return -2.0 / p * log_nu(rho * r + 1.0) + 2.0 * beta / p * log_nu(r)

    def l2(r):
        return -beta * log_nu(r + 1.0) + log_nu(r)

    return radial_tail_integral(l1, tol), radial_tail_integral(l2, tol)


def _check_params(rho, beta):
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")


def check_plane_density(spec: WeightSpec, e, rho: float, beta: float, tol: float = 1e-10) -> DensityReport:
    """Both integrability conditions for nu(r) = w(r^2):

    I1 = int nu(rho|z| + 1)^(-2/p) nu(|z|)^(2 beta/p) dA
    I2 = int nu(|z| + 1)^(-beta) nu(|z|) dA
    """
    _check_params(rho, beta)
    p = _p(e)
    params = {"p": p, "rho": rho, "beta": beta, "weight": spec.label()}
    if spec.family == "fock":
        params["alpha"] = spec.params["alpha"]
    if not spec.is_plane:
        return DensityReport("disc", {}, True, params, ["polynomials are dense for R < inf"])

    def log_nu(r):
        return float(spec.log_w(r * r))

    i1, i2 = _density_integrals(log_nu, p, rho, beta, tol)
    notes = [f"{name} divergent" for name, it in (("I1", i1), ("I2", i2)) if not it["finite"]]
    return DensityReport("plane", {"I1": i1, "I2": i2}, i1["finite"] and i2["finite"], params, notes)


def combined_fock_log_nu(alpha: float) -> Callable[[float], float]:
    """log of the decreasing envelope of nu(r) = (r^2 + 1) e^(-alpha r^2).

    For alpha < 1 the weight increases up to x* = 1/alpha - 1, so it is
    frozen at its maximum there.
    """
    xs = max(0.0, 1.0 / alpha - 1.0)

    def log_nu(r):
        x = max(r * r, xs)
        return math.log1p(x) - alpha * x

    return log_nu


def fock_density_certificate(alpha: float, e, rho: float = 0.5, beta: float = 0.75,
                             tol: float = 1e-10) -> DensityReport:
    """Density check for the measure (|z|^2 + 1) e^(-alpha |z|^2) dA."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    _check_params(rho, beta)
    p = _p(e)
    i1, i2 = _density_integrals(combined_fock_log_nu(alpha), p, rho, beta, tol)
    notes = [f"{name} divergent" for name, it in (("I1", i1), ("I2", i2)) if not it["finite"]]
    if alpha < 1:
        notes.append(f"decreasing envelope used below |z|^2 = {1 / alpha - 1:g}")
    return DensityReport("fock-combined", {"I1": i1, "I2": i2}, i1["finite"] and i2["finite"],
                         {"p": p, "rho": rho, "beta": beta, "alpha": alpha}, notes)


def closed_graph_ratio(alpha: float, n: int, p: float = 2.0, grid: QuadGrid | None = None) -> float:
    """||z^n|| in A^p(|z|^2 e^(-alpha|z|^2)) over ||z^n|| in A^p(e^(-alpha|z|^2)), by quadrature.

    Exact value ((np + 2)/(2 alpha))^(1/p).
    """
    spec = fock(alpha)
    need = int(math.ceil(n * p / 2.0)) + 1
    if grid is None or grid.max_monomial is None or grid.max_monomial < need:
        grid = build_plane_grid(spec, tol=1e-14, max_monomial=need, radial_order=32, angular_order=8)
    W = grid.measure(spec, "w")
    r = np.abs(grid.z_flat)
    top = np.sum(W * r ** (n * p + 2.0))
    bottom = np.sum(W * r ** (n * p))
    return float((top / bottom) ** (1.0 / p))
