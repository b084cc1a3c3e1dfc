"""Tensor radial x angular quadrature for area integrals against w(|z|^2) dA.

Radial rules integrate g(r) r dr (the Jacobian is folded into the radial
weights), angular rules integrate over [0, 2pi).  Plane grids are truncated
at a radius R_eff chosen so the discarded moment tails are below ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate

from .weights import WeightSpec

TWO_PI = 2.0 * math.pi


class InvalidOrderError(ValueError):
    pass


class NonConvergentTailError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class QuadGrid:
    radius: float
    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_nodes: np.ndarray
    angular_weights: np.ndarray
    R_eff: float
    tail_bound: float = 0.0
    max_monomial: int | None = None
    equispaced: bool = True
    radial_order: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def angular_order(self) -> int:
        return self.angular_nodes.size

    @property
    def is_plane(self) -> bool:
        return math.isinf(self.radius)

    @cached_property
    def z(self) -> np.ndarray:
        """All nodes as a 2-d (radial, angular) complex array."""
        return self.radial_nodes[:, None] * np.exp(1j * self.angular_nodes)[None, :]

    @cached_property
    def z_flat(self) -> np.ndarray:
        return np.ascontiguousarray(self.z.ravel())

    @cached_property
    def area_weights(self) -> np.ndarray:
        """dA weights matching ``z_flat``."""
        return np.ascontiguousarray(np.outer(self.radial_weights, self.angular_weights).ravel())

    def radial_to_flat(self, values) -> np.ndarray:
        """Broadcast a per-radius array to the flat node layout."""
        return np.repeat(np.asarray(values, dtype=float), self.angular_order)

    def measure(self, spec: WeightSpec, kind: str = "w") -> np.ndarray:
        """Flat node weights for w(|z|^2) dA (``kind='w'``) or
        -|z|^2 w'(|z|^2) dA (``kind='dw'``)."""
        key = (id(spec), spec.family, tuple(sorted(spec.params.items())), spec.radius, kind)
        cache = self.meta.setdefault("_measures", {})
        if key not in cache:
            r2 = self.radial_nodes**2
            if kind == "w":
                dens = spec._w(r2)
            elif kind == "dw":
                dens = -r2 * spec._w_prime(r2)
            else:
                raise ValueError(kind)
            cache[key] = np.ascontiguousarray(self.area_weights * self.radial_to_flat(dens))
        return cache[key]


def gauss_legendre(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(breaks, n: int):
    """Gauss-Legendre with ``n`` nodes on every interval between ``breaks``."""
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        x, w = gauss_legendre(a, b, n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def equispaced_angles(m: int):
    theta = TWO_PI * np.arange(m) / m
    return theta, np.full(m, TWO_PI / m)


def build_disc_grid(R: float, radial_order: int = 48, angular_order: int = 64,
                    panels: int = 1) -> QuadGrid:
    """Gauss-Legendre in r on [0, R] times the equispaced rule in theta.

    With one panel, sum_i w_i g(r_i) = int_0^R g(r) r dr exactly for
    polynomials g of degree <= 2*radial_order - 2.
    """
    if not (0 < R < math.inf):
        raise ValueError(f"disc radius must be finite and positive, got {R}")
    if radial_order < 4 or angular_order < 4:
        raise InvalidOrderError("radial and angular orders must be >= 4")
    r, wr = composite_gauss(np.linspace(0.0, R, panels + 1), radial_order)
    th, wt = equispaced_angles(angular_order)
    return QuadGrid(R, r, wr * r, th, wt, R_eff=R, radial_order=radial_order)


def _tail_integral(g, R: float, tol: float, max_panels: int = 64) -> float:
    """int_R^inf g(r) dr over doubling panels; raises when it will not settle."""
    total = 0.0
    prev = None
    growth = 0
    a = R
    for _ in range(max_panels):
        b = 2.0 * a
        inc, _ = integrate.quad(g, a, b, limit=200, epsabs=1e-3 * tol, epsrel=1e-10)
        if not math.isfinite(inc):
            raise NonConvergentTailError(f"tail integrand not finite on [{a:g}, {b:g}]")
        total += inc
        if prev is not None:
            if abs(inc) >= 0.5 * abs(prev) and abs(inc) > 1e-300:
                growth += 1
                if growth >= 12:
                    raise NonConvergentTailError(
                        f"tail increments stopped shrinking past r={a:g} (last {inc:.3g})")
            else:
                growth = 0
            if abs(inc) <= 1e-3 * tol and abs(inc) <= 0.5 * abs(prev):
                return total
        prev = inc
        a = b
    raise NonConvergentTailError("tail did not converge within the panel budget")


def plane_tail(spec: WeightSpec, R: float, m: int, tol: float, kind: str = "w") -> float:
    """2pi int_R^inf r^(2m+1) w(r^2) dr (kind 'w') or with -r^2 w'(r^2) ('dw')."""
    if kind == "w":
        def g(r):
            return r ** (2 * m + 1) * float(spec._w(r * r))
    else:
        def g(r):
            return -(r ** (2 * m + 3)) * float(spec._w_prime(r * r))
    return TWO_PI * _tail_integral(g, R, tol)


def _max_tail(spec, R, max_monomial, tol):
    # for r >= 1, r^(2m+1) <= r^(2M+1), so the top moment dominates every tail
    return max(plane_tail(spec, R, max_monomial, tol, "w"),
               plane_tail(spec, R, max_monomial, tol, "dw"))


def find_plane_radius(spec: WeightSpec, tol: float, max_monomial: int) -> tuple[float, float]:
    """Smallest R (to 0.1%) with every moment tail below ``tol``."""
    lo, hi = 1.0, 1.0
    t_hi = _max_tail(spec, hi, max_monomial, tol)
    doublings = 0
    while t_hi >= tol:
        lo, hi = hi, 2.0 * hi
        t_hi = _max_tail(spec, hi, max_monomial, tol)
        doublings += 1
        if doublings > 40:
            raise NonConvergentTailError("no finite truncation radius found")
    if hi == 1.0:
        return hi, t_hi
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        t_mid = _max_tail(spec, mid, max_monomial, tol)
        if t_mid < tol:
            hi, t_hi = mid, t_mid
        else:
            lo = mid
    return hi, t_hi


def build_plane_grid(spec: WeightSpec, tol: float = 1e-12, max_monomial: int = 10,
                     radial_order: int = 24, angular_order: int | None = None) -> QuadGrid:
    """Truncated grid for integrals over the plane.

    R_eff is found by doubling then bisection so that the tails of
    |z|^(2m) w and |z|^(2m+2)(-w') beyond it are below ``tol`` for every
    m <= ``max_monomial``.  [0, R_eff] is split into unit-ish panels.
    """
    if not spec.is_plane:
        raise ValueError("build_plane_grid needs a plane weight (R = inf)")
    if radial_order < 4:
        raise InvalidOrderError("radial order must be >= 4")
    if angular_order is None:
        angular_order = 4 * max_monomial + 8
    if angular_order < 4:
        raise InvalidOrderError("angular order must be >= 4")
    R_eff, tail = find_plane_radius(spec, tol, max_monomial)
    panels = max(8, math.ceil(R_eff))
    r, wr = composite_gauss(np.linspace(0.0, R_eff, panels + 1), radial_order)
    th, wt = equispaced_angles(angular_order)
    return QuadGrid(math.inf, r, wr * r, th, wt, R_eff=R_eff, tail_bound=tail,
                    max_monomial=max_monomial, radial_order=radial_order,
                    meta={"tol": tol, "panels": panels})


def build_grid(spec: WeightSpec, max_degree: int, radial_order: int | None = None,
               angular_order: int | None = None, tol: float = 1e-12, p_max: float = 2.0) -> QuadGrid:
    """Grid sized for polynomials up to ``max_degree`` with exponents <= ``p_max``."""
    if angular_order is None:
        angular_order = max(4 * max_degree + 8, 64)
    if spec.is_plane:
        max_mono = int(math.ceil(p_max * max_degree / 2.0)) + 2
        return build_plane_grid(spec, tol, max_mono, radial_order or 24, angular_order)
    return build_disc_grid(spec.radius, radial_order or 64, angular_order)


def with_angular_order(grid: QuadGrid, angular_order: int) -> QuadGrid:
    """Same radial rule, new equispaced angular rule."""
    th, wt = equispaced_angles(angular_order)
    return QuadGrid(grid.radius, grid.radial_nodes, grid.radial_weights, th, wt,
                    R_eff=grid.R_eff, tail_bound=grid.tail_bound,
                    max_monomial=grid.max_monomial, radial_order=grid.radial_order,
                    meta={k: v for k, v in grid.meta.items() if not k.startswith("_")})


def _graded_breaks(center, scale, levels, sigma):
    offs = scale * sigma ** np.arange(levels + 1)
    return np.concatenate([center - offs, center + offs])


def build_adapted_disc_grid(R: float, points, order: int = 10, base_radial: int = 6,
                            base_angular: int = 12, levels: int = 6, sigma: float = 0.2,
                            near: float = 0.25) -> QuadGrid:
    """Composite Gauss grid on D_R with geometric grading toward ``points``.

    Meant for integrands that are only Hoelder-continuous at isolated points
    (|f|^p and |f|^(p-2) near zeros of f).  Every point within
    ``near * R`` of the closed disc gets radial and angular breakpoints
    graded geometrically (ratio ``sigma``) toward it, scaled so the cells
    stay roughly square in the physical plane.
    """
    if not (0 < R < math.inf):
        raise ValueError("adapted grids are for finite discs")
    rb = [np.linspace(0.0, R, base_radial + 1)]
    tb = [np.linspace(0.0, TWO_PI, base_angular + 1)]
    scale = 0.5 * R
    for z0 in np.atleast_1d(np.asarray(points, dtype=complex)):
        r0 = abs(z0)
        if r0 > R * (1.0 + near):
            continue
        rb.append(_graded_breaks(min(r0, R), scale, levels, sigma))
        if r0 > 0:
            th0 = math.atan2(z0.imag, z0.real) % TWO_PI
            ang = _graded_breaks(0.0, min(scale / r0, math.pi), levels, sigma)
            tb.append((th0 + ang) % TWO_PI)
    rbreaks = np.unique(np.clip(np.concatenate(rb), 0.0, R))
    rbreaks = rbreaks[np.concatenate([[True], np.diff(rbreaks) > 1e-15 * R])]
    tbreaks = np.unique(np.concatenate(tb + [[0.0, TWO_PI]]))
    tbreaks = tbreaks[np.concatenate([[True], np.diff(tbreaks) > 1e-15])]
    r, wr = composite_gauss(rbreaks, order)
    th, wt = composite_gauss(tbreaks, order)
    return QuadGrid(R, r, wr * r, th, wt, R_eff=R, equispaced=False, radial_order=order,
                    meta={"adapted_points": len(rb) - 1})


def integrate_area(grid: QuadGrid, integrand) -> complex:
    """sum_ij wr_i wt_j F(r_i e^{i theta_j}) for a vectorised ``integrand``."""
    vals = np.asarray(integrand(grid.z))
    total = np.sum(grid.radial_weights[:, None] * grid.angular_weights[None, :] * vals)
    return complex(total)


def monomial_moment(spec: WeightSpec, grid: QuadGrid, m: int) -> float:
    """int |z|^(2m) w(|z|^2) dA on the grid."""
    return float(monomial_moments(spec, grid, m + 1)[m])


def monomial_moments(spec: WeightSpec, grid: QuadGrid, count: int) -> np.ndarray:
    """Moments for m = 0 .. count-1, cached on the grid."""
    if count < 1:
        return np.zeros(0)
    if grid.max_monomial is not None and count - 1 > grid.max_monomial:
        raise ValueError(f"moment m={count - 1} exceeds grid max_monomial={grid.max_monomial}")
    key = ("_moments", id(spec), spec.family, tuple(sorted(spec.params.items())), spec.radius)
    cached = grid.meta.get(key)
    if cached is not None and cached.size >= count:
        return cached[:count]
    r2 = grid.radial_nodes**2
    base = grid.radial_weights * spec._w(r2) * np.sum(grid.angular_weights)
    mom = np.array([np.sum(base * r2**m) for m in range(count)])
    grid.meta[key] = mom
    return mom


def fock_moment(alpha: float, m: float) -> float:
    """Closed form int |z|^(2m) (1/alpha) e^{-alpha|z|^2} dA = pi Gamma(m+1) / alpha^(m+2)."""
    return math.pi * math.exp(math.lgamma(m + 1.0) - (m + 2.0) * math.log(alpha))
