"""First-order eigenvalue transport from the level-set domain to the target.

rho^2 is the exact Dirichlet eigenvalue of the region enclosed by the zero
level set S_u. Moving S_u onto the target S with outward normal speed C
changes the eigenvalue by

    d lambda = - integral_{S_u} C |grad psi|^2 dS,

with psi the L2-normalized eigenfunction. One explicit step gives the
corrected estimate.
"""
from dataclasses import dataclass
import math

import numpy as np

from .levelset import (
    DEFAULT_ROOT,
    _require_radial,
    eval_u_many,
    level_point,
    levelset_radius,
    levelset_radius_derivative,
)
from .specfun import bessel_j_zero


@dataclass(frozen=True)
class NormalizedEigenfunction:
    params: object
    l2_norm: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.l2_norm > 0:
            raise ValueError("l2_norm must be positive")

    def __call__(self, r, theta):
        return self.amplitude * eval_u_many(self.params, r, theta) / self.l2_norm

    def grad_norm_sq(self, r, theta):
        p = level_point(self.params, r, theta)
        return (self.amplitude / self.l2_norm) ** 2 * p.grad_norm_sq


def _ray_guess(params, shape, theta):
    if shape is not None:
        return float(shape.radius(theta))
    return bessel_j_zero(0, 1) / params.rho


def boundary_arc_element(params, theta, r_u, cfg=DEFAULT_ROOT):
    """dS/dtheta = sqrt(r_u^2 + (dr_u/dtheta)^2) on the level set."""
    dr = levelset_radius_derivative(params, theta, r_u)
    return math.hypot(r_u, dr)


def l2_norm_sq(params, n_radial, n_angular, cfg=DEFAULT_ROOT, shape=None, amplitude=1.0):
    """Integral of (amplitude * u)^2 over the region inside the level set.

    Gauss-Legendre in r on [0, r_u(theta)], periodic trapezoid in theta.
    Each ray's root is sought near the target radius when ``shape`` is
    given, otherwise near the disk radius j_{0,1} / rho.
    """
    x, w = np.polynomial.legendre.leggauss(n_radial)
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    r_u = np.array([levelset_radius(params, t, _ray_guess(params, shape, t), cfg) for t in theta])
    half = 0.5 * r_u[:, None]
    r = half * (x[None, :] + 1.0)
    u = eval_u_many(params, r, np.broadcast_to(theta[:, None], r.shape))
    radial = np.sum((half * w[None, :]) * u * u * r, axis=1)
    return amplitude**2 * float(np.sum(radial)) * (2 * np.pi / n_angular)


def normalize(params, n_radial=32, n_angular=64, cfg=DEFAULT_ROOT, shape=None):
    return NormalizedEigenfunction(params, math.sqrt(l2_norm_sq(params, n_radial, n_angular, cfg, shape)))


def hadamard_terms(params, shape, thetas, cfg=DEFAULT_ROOT):
    """Per-angle (C, |grad u|^2, dS/dtheta) on the level set.

    C is the signed normal gap D * (r_hat . N), positive when the target lies
    outside the level set; N = -grad u / |grad u| points outward because
    u(0) = 1 > 0.
    """
    out = np.empty((len(thetas), 3))
    for j, t in enumerate(thetas):
        big_r = float(shape.radius(t))
        r_u = levelset_radius(params, t, big_r, cfg)
        p = level_point(params, r_u, t)
        _require_radial(p)
        g2 = p.grad_norm_sq
        out[j, 0] = (big_r - r_u) * (-p.u_r / math.sqrt(g2))
        out[j, 1] = g2
        out[j, 2] = math.hypot(r_u, p.u_theta / p.u_r)
    return out


def hadamard_corrected_eigenvalue(params, shape, grid, n_radial=32, cfg=DEFAULT_ROOT, amplitude=1.0):
    """rho^2 minus the first-order Hadamard change from S_u to the target."""
    thetas = grid.thetas
    terms = hadamard_terms(params, shape, thetas, cfg)
    norm_sq = l2_norm_sq(params, n_radial, len(thetas), cfg, shape, amplitude)
    weight = 2 * np.pi / len(thetas)
    integrand = terms[:, 0] * (amplitude**2 * terms[:, 1] / norm_sq) * terms[:, 2]
    return params.rho**2 - weight * float(np.sum(integrand))
