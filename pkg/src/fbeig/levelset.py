"""Trial eigenfunction u(r, theta) and its zero level set.

    u(r, theta) = J_0(rho r) + sum_{k=1..N} P_k J_{ks}(rho r) cos(k s theta)

Every such u solves -Lap u = rho^2 u exactly, so rho^2 is a Dirichlet
eigenvalue of the region bounded by the zero level set of u.
"""
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from . import _kernels
from .specfun import DEFAULT_CONFIG

_EPS = np.finfo(float).eps


class LevelSetError(ArithmeticError):
    """Base class for level-set evaluation failures."""


class NoRoot(LevelSetError):
    """No sign change of u along the ray near the guess."""


class NonConvergence(LevelSetError):
    """Root iteration failed to meet the residual tolerance."""


class TangentialZero(LevelSetError):
    """u_r vanishes at the root, so the ray is tangent to the level set."""


@dataclass(frozen=True)
class LevelSetParams:
    """rho and the coefficients P_1..P_N; P_0 = 1 is implicit."""

    rho: float
    coeffs: tuple = field(default=())
    sym_step: int = 2

    def __post_init__(self):
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ValueError(f"rho must be positive and finite, got {self.rho}")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError("coefficients must be finite")
        if int(self.sym_step) != self.sym_step or self.sym_step < 1:
            raise ValueError(f"sym_step must be a positive integer, got {self.sym_step}")

    @property
    def n_terms(self):
        return len(self.coeffs)

    @cached_property
    def coeff_array(self):
        return np.array(self.coeffs, dtype=float)

    def as_vector(self):
        """Parameter vector [rho, P_1, ..., P_N]."""
        return np.concatenate(([self.rho], self.coeff_array))

    @classmethod
    def from_vector(cls, vec, sym_step):
        return cls(float(vec[0]), tuple(vec[1:]), sym_step)


@dataclass(frozen=True)
class RootConfig:
    """Tolerances for locating r_u(theta) along one ray.

    The bracket [guess/g, guess*g] starts at g = 1 + initial_bracket; each
    expansion multiplies (g - 1) by ``bracket_expansion`` until g reaches
    ``max_ratio``.
    """

    abs_tol: float = 1e-14
    max_newton: int = 50
    bracket_expansion: float = 1.5
    initial_bracket: float = 0.02
    max_ratio: float = 4.0

    def __post_init__(self):
        if self.abs_tol < 1e-14:
            raise ValueError("abs_tol must be >= 1e-14")
        if self.max_newton < 8:
            raise ValueError("max_newton must be >= 8")
        if not self.bracket_expansion > 1:
            raise ValueError("bracket_expansion must exceed 1")
        if not (self.initial_bracket > 0 and self.max_ratio > 1):
            raise ValueError("initial_bracket must be positive and max_ratio > 1")


DEFAULT_ROOT = RootConfig()


@dataclass(frozen=True)
class LevelPoint:
    """u and its first derivatives at a point on a ray."""

    theta: float
    r: float
    u: float
    u_r: float
    u_theta: float
    u_rho: float
    basis: np.ndarray

    @property
    def grad_norm_sq(self):
        return self.u_r**2 + (self.u_theta / self.r) ** 2


def _kargs():
    return DEFAULT_CONFIG.miller_overshoot, DEFAULT_CONFIG.series_cutoff


def eval_u(params, r, theta):
    u, _ = _kernels.u_value_dr(params.rho, params.coeff_array, params.sym_step,
                               float(r), float(theta), *_kargs())
    return float(u)


def eval_u_many(params, r, theta):
    """u at paired arrays of radii and angles (broadcast together)."""
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    out = _kernels.u_many(params.rho, params.coeff_array, params.sym_step,
                          r.ravel(), theta.ravel(), *_kargs())
    return np.asarray(out).reshape(r.shape)


def level_point(params, r, theta):
    u, u_r, u_theta, u_rho, basis = _kernels.u_full(
        params.rho, params.coeff_array, params.sym_step, float(r), float(theta), *_kargs())
    return LevelPoint(float(theta), float(r), float(u), float(u_r), float(u_theta),
                      float(u_rho), np.asarray(basis))


def grad_u_polar(params, r, theta):
    """Return (u_r, u_theta, |grad u|^2) at a point with r > 0."""
    if not r > 0:
        raise ValueError("grad_u_polar needs r > 0")
    p = level_point(params, r, theta)
    return p.u_r, p.u_theta, p.grad_norm_sq


def _refine(func, a, b, fa, x0, cfg):
    """Safeguarded Newton on a sign-change bracket [a, b]."""
    if a > b:
        a, b = b, a
    x = min(max(x0, a), b)
    best_x, best_f = x, math.inf
    converged = False
    for _ in range(cfg.max_newton):
        f, df = func(x)
        if abs(f) < abs(best_f):
            best_x, best_f = x, f
        if f == 0.0:
            return x
        if converged:
            break
        if (f < 0) == (fa < 0):
            a, fa = x, f
        else:
            b = x
        x_new = x - f / df if df != 0.0 else math.nan
        if not a < x_new < b:
            x_new = 0.5 * (a + b)
        if abs(f) <= cfg.abs_tol:
            # one polishing step past the tolerance, keep whichever is better
            converged = True
        elif abs(x_new - x) <= 2 * _EPS * abs(x):
            converged = True
        x = x_new
    if abs(best_f) <= cfg.abs_tol:
        return best_x

    # Newton stalled: plain bisection down to machine resolution
    for _ in range(200):
        m = 0.5 * (a + b)
        f, _ = func(m)
        if abs(f) < abs(best_f):
            best_x, best_f = m, f
        if abs(f) <= cfg.abs_tol or b - a <= 4 * _EPS * abs(m):
            break
        if (f < 0) == (fa < 0):
            a, fa = m, f
        else:
            b = m
    if abs(best_f) <= cfg.abs_tol:
        return best_x
    raise NonConvergence(f"|u| = {abs(best_f):.3g} > {cfg.abs_tol:.3g} near r = {best_x!r}")


def find_bracketed_root(func, guess, cfg=DEFAULT_ROOT):
    """Root of ``func`` nearest ``guess`` on the positive half line.

    ``func(x)`` returns ``(f, df/dx)``. Rings [guess/g, guess*g] widen
    geometrically; the first ring showing a sign change on either side is
    refined, and if both sides change sign the root closer to ``guess`` wins.
    """
    if not guess > 0:
        raise ValueError("guess must be positive")
    f0, _ = func(guess)
    if f0 == 0.0:
        return guess
    inner, f_inner = guess, f0
    outer, f_outer = guess, f0
    width = cfg.initial_bracket
    while True:
        g = min(1.0 + width, cfg.max_ratio)
        lo, hi = guess / g, guess * g
        f_lo, _ = func(lo)
        f_hi, _ = func(hi)
        roots = []
        if f_lo == 0.0:
            roots.append(lo)
        elif (f_lo < 0) != (f_inner < 0):
            roots.append(_refine(func, lo, inner, f_lo, inner, cfg))
        if f_hi == 0.0:
            roots.append(hi)
        elif (f_hi < 0) != (f_outer < 0):
            roots.append(_refine(func, outer, hi, f_outer, outer, cfg))
        if roots:
            return min(roots, key=lambda x: abs(x - guess))
        if g >= cfg.max_ratio:
            raise NoRoot(f"no sign change of u within a factor {cfg.max_ratio} of r = {guess}")
        inner, f_inner = lo, f_lo
        outer, f_outer = hi, f_hi
        width *= cfg.bracket_expansion


def levelset_radius(params, theta, guess, cfg=DEFAULT_ROOT):
    """r_u(theta): the zero of u along the ray at ``theta`` nearest ``guess``."""
    coeffs = params.coeff_array
    rho, sym = params.rho, params.sym_step
    theta = float(theta)
    overshoot, cutoff = _kargs()

    def func(r):
        return _kernels.u_value_dr(rho, coeffs, sym, r, theta, overshoot, cutoff)

    try:
        return float(find_bracketed_root(func, float(guess), cfg))
    except LevelSetError as exc:
        raise type(exc)(f"theta = {theta!r}: {exc}") from None


def _require_radial(point):
    if point.u_r == 0.0 or abs(point.u_r) <= 1e-12 * abs(point.u_theta):
        raise TangentialZero(f"u_r = {point.u_r:.3g} at theta = {point.theta!r}")


def levelset_radius_derivative(params, theta, r_u):
    """d r_u / d theta = -u_theta / u_r by implicit differentiation."""
    p = level_point(params, r_u, theta)
    _require_radial(p)
    return -p.u_theta / p.u_r


def sensitivity_from_point(point):
    _require_radial(point)
    return -np.concatenate(([point.u_rho], point.basis)) / point.u_r


def radius_sensitivity(params, theta, r_u):
    """d r_u / d p for p = (rho, P_1, ..., P_N), holding theta fixed."""
    return sensitivity_from_point(level_point(params, r_u, theta))
