"""Dirichlet Laplace eigenvalues of star-shaped planar domains.

The zero level set of u = J_0(rho r) + sum_k P_k J_{ks}(rho r) cos(k s theta)
is fitted to the target boundary; rho^2 is then the exact eigenvalue of the
fitted region, and a first-order Hadamard step carries it to the target.
"""
from . import _kernels
from .domain import Ellipse, FourierBoundary, circle, shape_radius, shape_symmetry
from .fitter import (
    FitError,
    FitResult,
    OptimConfig,
    QuadratureGrid,
    fit_flow,
    fit_gauss_newton,
    objective_rms,
    prescribed_c_step,
    residual_jacobian,
)
from .hadamard import hadamard_corrected_eigenvalue, l2_norm_sq
from .levelset import LevelSetParams, RootConfig, eval_u, grad_u_polar, levelset_radius
from .oracle import OracleResult, fd_lowest_eigenvalue, oracle_eigenvalue, richardson_extrapolate
from .specfun import bessel_j, bessel_j_prime, bessel_j_zero

__version__ = "0.1.0"


def active_backend():
    """Name of the kernel backend in use: "cython" or "python"."""
    return _kernels.BACKEND


__all__ = [
    "Ellipse",
    "FitError",
    "FitResult",
    "FourierBoundary",
    "LevelSetParams",
    "OptimConfig",
    "OracleResult",
    "QuadratureGrid",
    "RootConfig",
    "active_backend",
    "bessel_j",
    "bessel_j_prime",
    "bessel_j_zero",
    "circle",
    "eval_u",
    "fd_lowest_eigenvalue",
    "fit_flow",
    "fit_gauss_newton",
    "grad_u_polar",
    "hadamard_corrected_eigenvalue",
    "l2_norm_sq",
    "levelset_radius",
    "objective_rms",
    "oracle_eigenvalue",
    "prescribed_c_step",
    "residual_jacobian",
    "richardson_extrapolate",
    "shape_radius",
    "shape_symmetry",
]
