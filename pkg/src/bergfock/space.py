"""Polynomials and the functionals evaluated on them.

Integral means follow the convention without the (2pi)^(-1/p) factor:
M_p(r, f) = (int_0^2pi |f(re^{it})|^p dt)^(1/p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .quadrature import QuadGrid, composite_gauss, monomial_moments
from .weights import WeightSpec

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class Poly:
    """sum_m coeffs[m] z^m.  Trailing zeros are allowed and kept."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, m: int, c: complex = 1.0) -> "Poly":
        a = np.zeros(m + 1, dtype=np.complex128)
        a[m] = c
        return cls(a)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = kernels.polyval(self.coeffs, np.ascontiguousarray(z.ravel()))
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    def __add__(self, other: "Poly") -> "Poly":
        n = max(self.coeffs.size, other.coeffs.size)
        return Poly(self.padded(n - 1) + other.padded(n - 1))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-1.0) * other

    def __mul__(self, c) -> "Poly":
        return Poly(self.coeffs * c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        n = max(self.coeffs.size, other.coeffs.size)
        return bool(np.array_equal(self.padded(n - 1), other.padded(n - 1)))

    def padded(self, degree: int) -> np.ndarray:
        out = np.zeros(degree + 1, dtype=np.complex128)
        k = min(degree + 1, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return out

    def truncate(self, n: int) -> "Poly":
        return Poly(self.padded(n))

    def derivative(self) -> "Poly":
        if self.degree == 0:
            return Poly([0.0])
        return Poly(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def times_z(self) -> "Poly":
        return Poly(np.concatenate([[0.0], self.coeffs]))

    def rotate(self, phi: float) -> "Poly":
        """z -> f(e^{i phi} z)."""
        return Poly(self.coeffs * np.exp(1j * phi * np.arange(self.coeffs.size)))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def zeros(self) -> np.ndarray:
        c = np.trim_zeros(self.coeffs, "b")
        if c.size <= 1:
            return np.zeros(0, dtype=complex)
        return np.roots(c[::-1])

    def to_pairs(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs) -> "Poly":
        out = []
        for item in pairs:
            if isinstance(item, (int, float)):
                out.append(complex(item))
            else:
                re, im = item
                out.append(complex(re, im))
        return cls(out)

    def __repr__(self):
        return f"Poly({np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True)
class Exponents:
    """p in (1, inf) with its conjugate q and phat = max(p-1, 1)."""

    p: float

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise ValueError(f"p must lie in (1, inf), got {self.p}")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def phat(self) -> float:
        return max(self.p - 1.0, 1.0)

    def conjugate(self) -> "Exponents":
        return Exponents(self.q)


def _p(e) -> float:
    return e.p if isinstance(e, Exponents) else float(e)


def grid_values(f: Poly, grid: QuadGrid) -> np.ndarray:
    return kernels.polyval(f.coeffs, grid.z_flat)


def lp_integral(f: Poly, p: float, grid: QuadGrid, node_weights: np.ndarray) -> float:
    """sum over nodes of node_weights * |f|^p."""
    return float(kernels.lp_sum(grid_values(f, grid), node_weights, p))


def norm(f: Poly, e, spec: WeightSpec, grid: QuadGrid) -> float:
    """||f|| in A^p_R(w(|z|^2))."""
    p = _p(e)
    return lp_integral(f, p, grid, grid.measure(spec, "w")) ** (1.0 / p)


def pairing(f: Poly, k: Poly, spec: WeightSpec, grid: QuadGrid, method: str = "moments") -> complex:
    """Phi_k(f) = int f conj(k) w dA.

    ``moments`` uses monomial orthogonality under radial weights;
    ``quadrature`` sums f conj(k) over the grid nodes.
    """
    if method == "quadrature":
        vals = grid_values(f, grid) * np.conj(grid_values(k, grid))
        return complex(np.sum(grid.measure(spec, "w") * vals))
    if method != "moments":
        raise ValueError(method)
    n = min(f.coeffs.size, k.coeffs.size)
    if grid.max_monomial is not None and max(f.degree, k.degree) > grid.max_monomial:
        raise ValueError(f"degree {max(f.degree, k.degree)} exceeds grid max_monomial {grid.max_monomial}")
    mom = monomial_moments(spec, grid, n)
    return complex(np.sum(f.coeffs[:n] * np.conj(k.coeffs[:n]) * mom))


def _mean_p(vals: np.ndarray, p: float) -> float:
    return float(np.mean(np.abs(vals) ** p) * TWO_PI)


def integral_mean(f: Poly, p: float, r: float, tol: float = 1e-13, max_order: int = 1 << 21) -> float:
    """M_p(r, f), refined by doubling the angular order until it settles."""
    if p <= 0:
        raise ValueError("p must be positive")
    if p == 2.0:
        m = np.arange(f.coeffs.size)
        return math.sqrt(TWO_PI * float(np.sum(np.abs(f.coeffs) ** 2 * r ** (2.0 * m))))
    return integral_mean_pp(f, p, r, tol, max_order) ** (1.0 / p)


def integral_mean_pp(f: Poly, p: float, r: float, tol: float = 1e-13, max_order: int = 1 << 21) -> float:
    """M_p(r, f)^p."""
    if p == 2.0:
        m = np.arange(f.coeffs.size)
        return TWO_PI * float(np.sum(np.abs(f.coeffs) ** 2 * r ** (2.0 * m)))
    M = max(4 * f.degree + 8, 16)
    zs = r * np.exp(1j * TWO_PI * np.arange(M) / M)
    prev = _mean_p(f(zs), p)
    while M < max_order:
        # the doubled rule reuses the old nodes; only the midpoints are new
        mid = r * np.exp(1j * TWO_PI * (np.arange(M) + 0.5) / M)
        cur = 0.5 * (prev + _mean_p(f(mid), p))
        M *= 2
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def _radial_grid(r: float, like: QuadGrid) -> QuadGrid:
    panels = max(1, math.ceil(r))
    order = max(like.radial_order, 16)
    rr, wr = composite_gauss(np.linspace(0.0, r, panels + 1), order)
    return QuadGrid(r, rr, wr * rr, like.angular_nodes, like.angular_weights, R_eff=r,
               equispaced=like.equispaced, radial_order=order)


def _grid_for_radius(r, spec: WeightSpec, grid: QuadGrid) -> QuadGrid:
    if r is None or math.isinf(r):
        if not spec.is_plane:
            return grid
        if not grid.is_plane:
            raise ValueError("r = inf needs a plane grid")
        return grid
    if r >= grid.R_eff * (1 - 1e-14):
        if grid.is_plane:
            raise ValueError(f"r={r} beyond the truncated plane grid (R_eff={grid.R_eff})")
        return grid
    return _radial_grid(r, grid)


def Dp_pp(f: Poly, e, spec: WeightSpec, grid: QuadGrid, r: float | None = math.inf) -> float:
    """D_p(r, f; w)^p = -int_{D_r} |z|^2 |f|^p w'(|z|^2) dA."""
    p = _p(e)
    g = _grid_for_radius(r, spec, grid)
    return lp_integral(f, p, g, g.measure(spec, "dw"))


def Dp(f: Poly, e, spec: WeightSpec, grid: QuadGrid, r: float | None = math.inf) -> float:
    return Dp_pp(f, e, spec, grid, r) ** (1.0 / _p(e))


def Np(f: Poly, e, spec: WeightSpec, r: float) -> float:
    """N_p(r, f) = (r^2/2)^(1/p) w(r^2)^(1/p) M_p(r, f), with w(R^2) the left limit."""
    p = _p(e)
    if not spec.is_plane and r > spec.radius:
        raise ValueError("r must not exceed R")
    if not spec.is_plane and r == spec.radius:
        wr = spec.boundary_value()
    else:
        wr = float(spec._w(r * r))
    return (0.5 * r * r * wr) ** (1.0 / p) * integral_mean(f, p, r)


def K_transform(k: Poly) -> Poly:
    """K(z) = (1/z) int_0^z k."""
    return Poly(k.coeffs / np.arange(1, k.coeffs.size + 1))


def dilate(f: Poly, rho: float) -> Poly:
    """f_rho(z) = f(rho z)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return Poly(f.coeffs * rho ** np.arange(f.coeffs.size))


def orthonormal_scales(spec: WeightSpec, grid: QuadGrid, degree: int) -> np.ndarray:
    """sqrt of the monomial moments, so z^m / scale_m has unit A^2 norm."""
    return np.sqrt(monomial_moments(spec, grid, degree + 1))


@dataclass
class MeansProfile:
    r: np.ndarray
    Mp: np.ndarray
    Dp: np.ndarray
    Np: np.ndarray
    p: float

    def to_csv(self) -> str:
        lines = [
            "# M_p(r,f) = (int_0^2pi |f(re^it)|^p dt)^(1/p), no (2pi)^(-1/p) normalisation",
            "r,Mp,Dp,Np",
        ]
        for row in zip(self.r, self.Mp, self.Dp, self.Np):
            lines.append(",".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"


def means_profile(f: Poly, e, spec: WeightSpec, grid: QuadGrid, r_values) -> MeansProfile:
    p = _p(e)
    r = np.asarray(r_values, dtype=float)
    if np.any(np.diff(r) <= 0):
        raise ValueError("r values must be increasing")
    mp = np.array([integral_mean(f, p, x) for x in r])
    dp = np.array([Dp(f, p, spec, grid, x) for x in r])
    npv = np.array([Np(f, p, spec, x) for x in r])
    return MeansProfile(r, mp, dp, npv, p)
