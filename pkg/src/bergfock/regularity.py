"""Checks of the Cauchy-Green base identity and the two regularity bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .extremal import SolveOptions, solve
from .quadrature import QuadGrid, build_adapted_disc_grid
from .space import Dp_pp, Exponents, Poly, Dp, grid_values, integral_mean, integral_mean_pp
from .weights import WeightSpec


@dataclass
class BoundReport:
    lhs: float
    rhs: float
    slack: float
    passed: bool
    tol: float
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
                "pass": self.passed, "tol": self.tol, "context": self.context}


def _bound_report(lhs, rhs, tol, context):
    return BoundReport(float(lhs), float(rhs), float(rhs - lhs), bool(lhs <= rhs * (1.0 + tol) + tol),
                       tol, context)


def _as_exponents(e) -> Exponents:
    return e if isinstance(e, Exponents) else Exponents(float(e))


def base_identity_sides(f: Poly, p: float, spec: WeightSpec, grid: QuadGrid) -> tuple[float, complex]:
    """(lhs, rhs) of the boundary-term identity on a disc grid.

    lhs = (R^2/2) w(R^2) int |f(Re^it)|^p dt - int |z|^2 |f|^p w'(|z|^2) dA
    rhs = int ((p/2) z f' + f) |f|^(p-1) sgn(conj f) w(|z|^2) dA
    """
    R = spec.radius
    th, wt = grid.angular_nodes, grid.angular_weights
    circle = kernels.lp_sum(f(R * np.exp(1j * th)), wt, p)
    lhs = 0.5 * R * R * spec.boundary_value() * circle + Dp_pp(f, p, spec, grid, R)

    z = grid.z_flat
    fv = grid_values(f, grid)
    dfv = kernels.polyval(f.derivative().coeffs, z)
    mod = np.abs(fv)
    dens = np.zeros_like(fv)
    nz = mod > 0
    dens[nz] = mod[nz] ** (p - 2.0) * np.conj(fv[nz])
    rhs = np.sum(grid.measure(spec, "w") * (0.5 * p * z * dfv + fv) * dens)
    return float(lhs), complex(rhs)


def verify_base_identity(f: Poly, e, spec: WeightSpec, grid: QuadGrid | None = None,
                         tol: float = 1e-8) -> BoundReport:
    """Both sides of the identity; ``pass`` iff |lhs - rhs| < tol (1 + |lhs|).

    Without a grid, one graded toward the zeros of f is built, since
    |f|^(p-2) is singular there when p < 2.
    """
    if spec.is_plane:
        raise ValueError("the base identity is checked on discs (R < inf)")
    p = e.p if isinstance(e, Exponents) else float(e)
    if grid is None:
        grid = build_adapted_disc_grid(spec.radius, f.zeros())
    lhs, rhs = base_identity_sides(f, p, spec, grid)
    gap = abs(lhs - rhs)
    return BoundReport(lhs, rhs.real, gap, bool(gap < tol * (1.0 + abs(lhs))), tol,
                       {"p": p, "weight": spec.label(), "degree": f.degree, "rhs_imag": rhs.imag})


def disc_bound_sides(f: Poly, k: Poly, e: Exponents, spec: WeightSpec, grid: QuadGrid,
                     dual_norm: float) -> tuple[float, float]:
    """lhs/rhs of the disc regularity bound for a given extremal f."""
    p, q = e.p, e.q
    R = spec.radius
    half_w = 0.5 * R * R * spec.boundary_value()
    lhs = half_w * integral_mean_pp(f, p, R) + Dp_pp(f, p, spec, grid, R)
    nq = half_w ** (1.0 / q) * integral_mean(k, q, R)
    dq = Dp(k, q, spec, grid, R)
    rhs = (2.0 ** (1.0 / q) * e.phat / dual_norm) ** q * (nq + dq) ** q
    return lhs, rhs


def verify_disc_bound(k: Poly, e, spec: WeightSpec, grid: QuadGrid, n: int, tol: float = 1e-6,
                      opts: SolveOptions | None = None) -> BoundReport:
    """Solve at degree n, then compare (R^2/2)w(R^2)M_p^p + D_p^p with the kernel side."""
    if spec.is_plane:
        raise ValueError("disc bound needs R < inf")
    e = _as_exponents(e)
    sol = solve(k, n, e, spec, grid, opts or SolveOptions(tol=1e-10))
    lhs, rhs = disc_bound_sides(sol.f, k, e, spec, grid, sol.dual_norm)
    rep = _bound_report(lhs, rhs, tol, {
        "p": e.p, "weight": spec.label(), "kernel": k.to_pairs(), "degree": n,
        "dual_norm": sol.dual_norm, "solver_residual": sol.residual, "converged": sol.converged,
    })
    if not sol.converged:
        rep.context["flag"] = "solver did not converge"
    return rep


def plane_bound_rhs(k: Poly, e: Exponents, spec: WeightSpec, grid: QuadGrid, dual_norm: float) -> float:
    return (e.phat * Dp(k, e.q, spec, grid) / dual_norm) ** (1.0 / (e.p - 1.0))


def verify_plane_bound(k: Poly, e, spec: WeightSpec, grid: QuadGrid, n: int, tol: float = 1e-6,
                       opts: SolveOptions | None = None, certify_density: bool = True) -> BoundReport:
    """D_p(inf, f) against (phat D_q(inf, k) / ||k||*)^(1/(p-1))."""
    if not spec.is_plane:
        raise ValueError("plane bound needs R = inf")
    e = _as_exponents(e)
    context = {"p": e.p, "weight": spec.label(), "kernel": k.to_pairs(), "degree": n}
    if certify_density:
        if spec.family == "fock":
            from .density import fock_density_certificate
            cert = fock_density_certificate(spec.params["alpha"], e)
            context["density_certified"] = cert.finite
        else:
            context["density_certified"] = None
    sol = solve(k, n, e, spec, grid, opts or SolveOptions(tol=1e-10))
    lhs = Dp(sol.f, e, spec, grid)
    rhs = plane_bound_rhs(k, e, spec, grid, sol.dual_norm)
    context.update(dual_norm=sol.dual_norm, solver_residual=sol.residual, converged=sol.converged)
    rep = _bound_report(lhs, rhs, tol, context)
    if not sol.converged:
        rep.context["flag"] = "solver did not converge"
    if context.get("density_certified") is False:
        rep.passed = False
        rep.context["flag"] = "density hypothesis not certified"
    return rep


def relative_gap(rep: BoundReport) -> float:
    return abs(rep.rhs - rep.lhs) / max(abs(rep.rhs), 1e-300)


__all__ = [
    "BoundReport", "base_identity_sides", "verify_base_identity", "disc_bound_sides",
    "verify_disc_bound", "plane_bound_rhs", "verify_plane_bound", "relative_gap",
]
