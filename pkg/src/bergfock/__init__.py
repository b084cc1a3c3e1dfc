"""Extremal problems in weighted Bergman and Fock type spaces."""

from .kernels import BACKEND
from .weights import WeightSpec, affine_disc, custom, fock, parse_weight, power_disc, validate
from .quadrature import QuadGrid, build_adapted_disc_grid, build_disc_grid, build_grid, build_plane_grid, monomial_moment
from .space import Exponents, Poly, Dp, Np, K_transform, dilate, integral_mean, norm, pairing
from .extremal import ExtremalSolution, SolveOptions, residual, solve, solve_p2
from .regularity import verify_base_identity, verify_disc_bound, verify_plane_bound

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "WeightSpec", "affine_disc", "custom", "fock", "parse_weight", "power_disc", "validate",
    "QuadGrid", "build_adapted_disc_grid", "build_disc_grid", "build_grid", "build_plane_grid",
    "monomial_moment", "Exponents", "Poly", "Dp", "Np", "K_transform", "dilate", "integral_mean", "norm",
    "pairing", "ExtremalSolution", "SolveOptions", "residual", "solve", "solve_p2",
    "verify_base_identity", "verify_disc_bound", "verify_plane_bound",
]
