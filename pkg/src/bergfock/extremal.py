"""The extremal problem over polynomials of degree <= n.

Maximise Re Phi_k(f) over ||f||_p = 1 by solving the equivalent convex
problem min ||g||_p^p on the affine slice Re Phi_k(g) = 1 and rescaling.
Optimality is certified by the orthogonality condition

    int h |f|^(p-1) conj(sgn f) w dA = Phi_k(h) / ||k||*_n   for all h,

checked on the monomials 1, z, ..., z^n.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .quadrature import QuadGrid, monomial_moments
from .space import Exponents, Poly, grid_values, norm, pairing
from .weights import WeightSpec

log = logging.getLogger(__name__)


class ZeroKernelError(ValueError):
    """The kernel vanishes after truncation to the search space."""


@dataclass
class SolveOptions:
    tol: float = 1e-8
    max_iter: int = 10_000
    init: Poly | None = None
    method: str = "newton"  # or "gradient"


@dataclass
class ExtremalSolution:
    f: Poly
    dual_norm: float
    residual: float
    iterations: int
    converged: bool
    degree: int
    p: float
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "p": self.p,
            "coefficients": self.f.to_pairs(),
            "dual_norm": self.dual_norm,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _kernel_functional(k: Poly, n: int, spec: WeightSpec, grid: QuadGrid) -> np.ndarray:
    """Phi_k(z^m) = conj(b_m) mu_m for m <= n."""
    mom = monomial_moments(spec, grid, n + 1)
    return np.conj(k.padded(n)) * mom


def _monomial_pnorms(p: float, spec: WeightSpec, grid: QuadGrid, n: int) -> np.ndarray:
    W = grid.measure(spec, "w")
    rr = np.abs(grid.z_flat)
    return np.array([np.sum(W * rr ** (m * p)) ** (1.0 / p) for m in range(n + 1)])


def residual(f: Poly, k: Poly, e, spec: WeightSpec, grid: QuadGrid, n: int,
             dual_norm: float | None = None) -> float:
    """Worst normalised defect of the orthogonality condition over z^0..z^n.

    ``dual_norm`` defaults to Re Phi_k(f); a non-positive value gives inf.
    """
    p = e.p if isinstance(e, Exponents) else float(e)
    if dual_norm is None:
        dual_norm = pairing(f, k, spec, grid).real
    if not dual_norm > 0:
        return math.inf
    vals = grid_values(f, grid)
    left = kernels.dual_moments(vals, grid.z_flat, grid.measure(spec, "w"), p, n + 1)
    phi = _kernel_functional(k, n, spec, grid)
    return float(np.max(np.abs(left - phi / dual_norm) / _monomial_pnorms(p, spec, grid, n)))


def solve_p2(k: Poly, n: int, spec: WeightSpec, grid: QuadGrid) -> ExtremalSolution:
    """Hilbert case: the extremal polynomial is the truncation T_n k, normalised."""
    tk = k.truncate(n)
    if tk.is_zero():
        raise ZeroKernelError("kernel vanishes after truncation to degree n")
    mom = monomial_moments(spec, grid, n + 1)
    size = math.sqrt(float(np.sum(np.abs(tk.coeffs) ** 2 * mom)))
    f = tk * (1.0 / size)
    res = residual(f, k, 2.0, spec, grid, n, dual_norm=size)
    return ExtremalSolution(f, size, res, 0, res < 1e-10, n, 2.0)


class _Objective:
    """F(x) = sum W |g|^p with g = sum_m (x_m + i x_{nb+m}) z^m / s_m."""

    def __init__(self, p, grid, W, scales):
        self.p = p
        self.z = grid.z_flat
        self.W = W
        self.s = scales
        self.nb = scales.size
        self.floor = 0.0

    def coeffs(self, x):
        return (x[: self.nb] + 1j * x[self.nb:]) / self.s

    def values(self, x):
        return kernels.polyval(self.coeffs(x), self.z)

    def value(self, x, vals=None):
        vals = self.values(x) if vals is None else vals
        return kernels.lp_sum(vals, self.W, self.p)

    def gradient(self, vals):
        sm = kernels.dual_moments(vals, self.z, self.W, self.p, self.nb)
        inv = np.concatenate([1.0 / self.s, 1.0 / self.s])
        return self.p * np.concatenate([sm.real, -sm.imag]) * inv

    def hessian(self, vals):
        floor = 1e-12 * float(np.max(np.abs(vals)))
        H = kernels.lp_hessian(vals, self.z, self.W, self.p, self.nb, max(floor, 1e-300))
        inv = np.concatenate([1.0 / self.s, 1.0 / self.s])
        return H * np.outer(inv, inv)


def _newton_direction(H, grad, a):
    m = a.size
    K = np.zeros((m + 1, m + 1))
    K[:m, :m] = H
    K[:m, m] = a
    K[m, :m] = a
    rhs = np.concatenate([-grad, [0.0]])
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        return None
    d = sol[:m]
    if not np.all(np.isfinite(d)):
        return None
    return d


def solve(k: Poly, n: int, e, spec: WeightSpec, grid: QuadGrid,
          opts: SolveOptions | None = None) -> ExtremalSolution:
    """General 1 < p < inf solver; deterministic for fixed options."""
    opts = opts or SolveOptions()
    e = e if isinstance(e, Exponents) else Exponents(float(e))
    p = e.p
    tk = k.truncate(n)
    if tk.is_zero():
        raise ZeroKernelError("kernel vanishes after truncation to degree n")

    scales = np.sqrt(monomial_moments(spec, grid, n + 1))
    beta = tk.coeffs * scales
    a = np.concatenate([beta.real, beta.imag])
    obj = _Objective(p, grid, grid.measure(spec, "w"), scales)

    if opts.init is None:
        x = a / np.dot(a, a)
    else:
        u = opts.init.padded(n) * scales
        x = np.concatenate([u.real, u.imag])
        c = np.dot(a, x)
        if not c > 0:
            raise ValueError("initial guess must have Re Phi_k > 0")
        x = x / c

    def finish(x, it, converged, res, history):
        g = Poly(obj.coeffs(x))
        size = norm(g, p, spec, grid)
        f = g * (1.0 / size)
        return ExtremalSolution(f, 1.0 / size, res, it, converged, n, p, history)

    aa = np.dot(a, a)
    history = []
    vals = obj.values(x)
    F = obj.value(x, vals)
    res = math.inf
    best, best_it = math.inf, 0
    for it in range(opts.max_iter + 1):
        g = Poly(obj.coeffs(x))
        size = F ** (1.0 / p)
        res = residual(g * (1.0 / size), k, e, spec, grid, n, dual_norm=1.0 / size)
        history.append((it, F, res))
        if res < opts.tol:
            return finish(x, it, True, res, history)
        if it == opts.max_iter:
            break
        grad = obj.gradient(vals)
        d = None
        if opts.method == "newton":
            d = _newton_direction(obj.hessian(vals), grad, a)
            if d is not None and np.dot(grad, d) >= 0:
                d = None
        if d is None:
            d = -(grad - (np.dot(grad, a) / aa) * a)
        slope = np.dot(grad, d)
        if slope >= 0:
            break
        # near the optimum F - F* ~ residual^2 drops below rounding, so a
        # step that keeps F within rounding of its value is also accepted
        slack = 1e-13 * abs(F)
        t = 1.0
        for _ in range(60):
            x_new = x + t * d
            vals_new = obj.values(x_new)
            F_new = obj.value(x_new, vals_new)
            if F_new <= F + 1e-4 * t * slope or (t == 1.0 and F_new <= F + slack):
                break
            t *= 0.5
        else:
            log.debug("line search stalled at iteration %d (residual %.3g)", it, res)
            break
        x, vals, F = x_new, vals_new, F_new
        if res < best:
            best, best_it = res, it
        elif it - best_it >= 50:
            log.debug("residual stagnated at %.3g after %d iterations", best, it)
            break
    return finish(x, len(history) - 1, res < opts.tol, res, history)


@dataclass
class ConvergenceReport:
    rows: list
    monotone: bool
    distances_decreasing: bool

    def to_dict(self):
        return {"rows": self.rows, "monotone": self.monotone,
                "distances_decreasing": self.distances_decreasing}


def subspace_convergence(k: Poly, e, spec: WeightSpec, grid: QuadGrid, n_list,
                         opts: SolveOptions | None = None, mono_tol: float = 1e-10) -> ConvergenceReport:
    """Rows (n, ||k||*_n, ||f_n - f_N||_p) with N the largest n."""
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    e = e if isinstance(e, Exponents) else Exponents(float(e))
    sols = [solve(k, n, e, spec, grid, opts) for n in n_list]
    last = sols[-1].f
    rows = []
    for n, s in zip(n_list, sols):
        rows.append({"n": n, "dual_norm": s.dual_norm, "distance": norm(s.f - last, e, spec, grid),
                     "residual": s.residual, "converged": s.converged})
    duals = [r["dual_norm"] for r in rows]
    monotone = all(b >= a - mono_tol for a, b in zip(duals, duals[1:]))
    dist = [r["distance"] for r in rows]
    decreasing = all(b <= a + 1e-12 for a, b in zip(dist, dist[1:]))
    return ConvergenceReport(rows, monotone, decreasing)


def kernel_continuity_probe(k: Poly, h: Poly, deltas, e, spec: WeightSpec, grid: QuadGrid, n: int,
                            opts: SolveOptions | None = None) -> list:
    """Rows (delta, ||f(k + delta h) - f(k)||_p)."""
    e = e if isinstance(e, Exponents) else Exponents(float(e))
    base = solve(k, n, e, spec, grid, opts).f
    rows = []
    for d in deltas:
        if d == 0:
            rows.append({"delta": 0.0, "distance": 0.0})
            continue
        f = solve(k + d * h, n, e, spec, grid, opts).f
        rows.append({"delta": float(d), "distance": norm(f - base, e, spec, grid)})
    return rows
