"""Fit the level set of u to a target boundary.

The objective is the RMS radial gap over uniform angles,

    sqrt( (1/m) sum_j (R(theta_j) - r_u(theta_j))^2 ),

minimized either by Levenberg-Marquardt on the analytic Jacobian or by a
prescribed-velocity flow that moves S_u with normal speed equal to the
normal gap.
"""
from dataclasses import dataclass, field, replace
import logging
import math
import time

import numpy as np

from .domain import shape_symmetry
from .hadamard import hadamard_corrected_eigenvalue
from .levelset import (
    DEFAULT_ROOT,
    LevelSetError,
    LevelSetParams,
    level_point,
    levelset_radius,
    sensitivity_from_point,
)
from .specfun import bessel_j_zero

log = logging.getLogger(__name__)

MAX_ROOT_FAILURES = 5


class FitError(RuntimeError):
    """Optimization could not continue."""


@dataclass(frozen=True)
class QuadratureGrid:
    m_angles: int = 60

    def __post_init__(self):
        if int(self.m_angles) != self.m_angles or self.m_angles < 8:
            raise ValueError("m_angles must be an integer >= 8")

    @property
    def thetas(self):
        return 2 * np.pi * np.arange(self.m_angles) / self.m_angles


@dataclass(frozen=True)
class OptimConfig:
    max_iterations: int = 500
    objective_tol: float = 1e-13
    step_tol: float = 1e-12
    initial_damping: float = 1e-3
    damping_update: float = 4.0
    flow_dt: float = 1.0
    ridge: float = 1e-20
    coeff_ridge: float = 1e-14
    max_motion: float = 0.1
    init_zero_index: int = 1
    hadamard: bool = True
    n_radial: int = 32
    objective_scale: float = 1.0
    ridge_relax: float = 1e-4
    coeff_ridge_floor: float = 1e-30

    def __post_init__(self):
        for name in ("max_iterations", "step_tol", "initial_damping", "flow_dt", "ridge", "coeff_ridge", "n_radial",
                     "max_motion", "objective_scale", "coeff_ridge_floor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.objective_tol < 1e-13:
            raise ValueError("objective_tol must be >= 1e-13")
        if not self.damping_update > 1:
            raise ValueError("damping_update must exceed 1")
        if not 0 < self.ridge_relax < 1:
            raise ValueError("ridge_relax must lie in (0, 1)")
        if self.init_zero_index < 1:
            raise ValueError("init_zero_index must be >= 1")


@dataclass
class FitResult:
    params: LevelSetParams
    eigenvalue_raw: float
    eigenvalue_hadamard: float | None
    rms_residual: float
    iterations: int
    converged: bool
    coeff_magnitudes: list = field(default_factory=list)
    per_iteration_log: list = field(default_factory=list)
    method: str = "gauss-newton"


def discrepancy(params, shape, theta, cfg=DEFAULT_ROOT):
    """D(theta) = R(theta) - r_u(theta), the root sought near R(theta)."""
    big_r = float(shape.radius(theta))
    return big_r - levelset_radius(params, theta, big_r, cfg)


def boundary_samples(params, shape, grid, cfg=DEFAULT_ROOT):
    """Residuals D_j and the level-set points at every grid angle."""
    thetas = grid.thetas
    big_r = shape.radius(thetas)
    residual = np.empty(len(thetas))
    points = []
    for j, t in enumerate(thetas):
        r_u = levelset_radius(params, t, float(big_r[j]), cfg)
        residual[j] = big_r[j] - r_u
        points.append(level_point(params, r_u, t))
    return residual, points


def objective_rms(params, shape, grid, cfg=DEFAULT_ROOT):
    d = np.array([discrepancy(params, shape, t, cfg) for t in grid.thetas])
    return float(np.sqrt(np.mean(d * d)))


def residual_jacobian(params, shape, grid, cfg=DEFAULT_ROOT):
    """Residual vector D_j and Jacobian dD_j/dp = -dr_u/dp, p = (rho, P_1..P_N)."""
    residual, points = boundary_samples(params, shape, grid, cfg)
    jac = np.array([-sensitivity_from_point(p) for p in points])
    return residual, jac


def _rms(residual):
    return float(np.sqrt(np.mean(residual * residual)))


def _column_scales(a):
    norms = np.linalg.norm(a, axis=0)
    norms[norms == 0] = 1.0
    return norms


def _augmented_solve(a, b, extra_rows, extra_rhs):
    aug = np.vstack([a] + extra_rows)
    rhs = np.concatenate([b] + extra_rhs)
    x, _, rank, _ = np.linalg.lstsq(aug, rhs, rcond=None)
    return x, rank


def _damped_step(jac, residual, coeffs, mu, coeff_ridge):
    """Levenberg-Marquardt step for the residual plus a value penalty on P.

    Minimizes |J dp + D|^2 + mu |diag(J^T J)^(1/2) dp|^2
    + coeff_ridge s_max^2 |P + dP|^2, with s_max the largest singular value
    of J. The last term only bites on coefficients whose columns lie below
    sqrt(coeff_ridge) s_max, i.e. that double precision cannot resolve; it
    keeps them at zero instead of drifting on rounding noise.
    """
    n = jac.shape[1]
    s_max = float(np.linalg.norm(jac, 2))
    lam = math.sqrt(coeff_ridge) * s_max
    pick = np.eye(n)[1:]
    step, _ = _augmented_solve(
        jac, -residual,
        [math.sqrt(mu) * np.diag(_column_scales(jac)), lam * pick],
        [np.zeros(n), -lam * np.asarray(coeffs, dtype=float)],
    )
    return step


def initial_params(n_terms, sym_step, opt=OptimConfig()):
    """Unit-disk eigenfunction: rho = j_{0,k}, every P_k = 0."""
    return LevelSetParams(bessel_j_zero(0, opt.init_zero_index), (0.0,) * n_terms, sym_step)


def _monitor(method, iteration, params, rms, t0, trace):
    trace.append((iteration, params.rho, rms))
    log.info("%s iter=%d rho=%.16g rms=%.6e t=%.3fs", method, iteration, params.rho, rms,
             time.monotonic() - t0)


def _finish(params, shape, grid, opt, cfg, rms, iterations, converged, trace, method):
    lam_h = None
    if opt.hadamard:
        lam_h = hadamard_corrected_eigenvalue(params, shape, grid, opt.n_radial, cfg)
    return FitResult(
        params=params,
        eigenvalue_raw=params.rho**2,
        eigenvalue_hadamard=lam_h,
        rms_residual=rms,
        iterations=iterations,
        converged=converged,
        coeff_magnitudes=[abs(c) for c in params.coeffs],
        per_iteration_log=trace,
        method=method,
    )


@dataclass
class _Stage:
    """Optimizer state carried from one penalty stage to the next."""

    params: LevelSetParams
    rms: float
    iteration: int = 0
    converged: bool = False


def _lm_stage(state, shape, grid, opt, cfg, budget, t0, trace):
    """Levenberg-Marquardt at a fixed coefficient penalty, from ``state``."""
    params = state.params
    sym_step = params.sym_step
    residual, jac = residual_jacobian(params, shape, grid, cfg)
    rms = state.rms
    mu = opt.initial_damping
    max_trust = opt.max_motion * float(np.mean(shape.radius(grid.thetas)))
    trust = max_trust
    failures = 0
    iteration = state.iteration
    converged = False
    while iteration < budget:
        if rms < opt.objective_tol:
            converged = True
            break
        iteration += 1
        step = _damped_step(opt.objective_scale * jac, opt.objective_scale * residual,
                            params.coeff_array, mu, opt.coeff_ridge)
        # cap the predicted boundary motion; far from the fit the linear model
        # is poor and long steps jump between nodal lines
        motion = float(np.max(np.abs(jac @ step)))
        if motion > trust:
            step *= trust / motion
        vec = params.as_vector()
        if np.linalg.norm(step) <= opt.step_tol * (np.linalg.norm(vec) + opt.step_tol):
            converged = True
            break
        trial = LevelSetParams.from_vector(vec + step, sym_step)
        try:
            t_res, t_jac = residual_jacobian(trial, shape, grid, cfg)
        except LevelSetError as exc:
            failures += 1
            log.debug("root failure on trial step (%d in a row): %s", failures, exc)
            if failures >= MAX_ROOT_FAILURES:
                raise FitError(f"{failures} consecutive root failures: {exc}") from exc
            mu *= opt.damping_update
            trust = 0.5 * min(trust, motion)
            continue
        failures = 0
        t_rms = _rms(t_res)
        if t_rms < rms:
            params, residual, jac, rms = trial, t_res, t_jac, t_rms
            mu = max(mu / opt.damping_update, 1e-15)
            trust = min(2.0 * trust, max_trust)
            _monitor("gauss-newton", iteration, params, rms, t0, trace)
        else:
            mu *= opt.damping_update
            trust = 0.5 * min(trust, motion)
    return _Stage(params, rms, iteration, converged)


def _continuation(stage_fn, method, shape, n_terms, grid, opt, cfg, sym_step):
    """Run ``stage_fn`` with a coefficient penalty relaxed stage by stage.

    The first stage uses ``opt.coeff_ridge``. While the RMS stays above
    ``objective_tol`` the penalty is multiplied by ``opt.ridge_relax`` and
    the optimizer restarts from the current parameters; relaxation stops
    once a stage fails to halve the RMS or the penalty reaches its floor.
    Shapes whose true coefficients are O(1) or decaying stop after the
    first stage; shapes whose coefficients grow get the penalty they need.
    """
    if sym_step is None:
        sym_step = shape_symmetry(shape)
    t0 = time.monotonic()
    params = initial_params(n_terms, sym_step, opt)
    state = _Stage(params, objective_rms(params, shape, grid, cfg))
    trace = []
    _monitor(method, 0, params, state.rms, t0, trace)
    ridge = opt.coeff_ridge
    while True:
        before = state.rms
        state = stage_fn(state, shape, grid, replace(opt, coeff_ridge=ridge), cfg,
                         opt.max_iterations, t0, trace)
        if state.rms < opt.objective_tol or state.iteration >= opt.max_iterations:
            break
        if ridge < opt.coeff_ridge and state.rms > 0.5 * before:
            break
        if ridge * opt.ridge_relax < opt.coeff_ridge_floor or n_terms == 0:
            break
        ridge *= opt.ridge_relax
        log.info("%s: rms %.3e above tolerance, relaxing coefficient penalty to %.0e", method, state.rms, ridge)
    converged = state.converged and state.iteration < opt.max_iterations or state.rms < opt.objective_tol
    return _finish(state.params, shape, grid, opt, cfg, state.rms, state.iteration, converged, trace, method)


def fit_gauss_newton(shape, n_terms, grid=QuadratureGrid(), opt=OptimConfig(), cfg=DEFAULT_ROOT,
                     sym_step=None):
    """Levenberg-Marquardt from the unit-circle eigenfunction.

    Steps are damped least-squares solves (see ``_damped_step``), capped so
    the predicted boundary motion stays inside a trust radius. A step is
    accepted only if the RMS strictly drops; rejected or root-failing steps
    raise mu and shrink the trust radius. ``opt.objective_scale`` multiplies
    the residual, which leaves the iterates unchanged.
    """
    return _continuation(_lm_stage, "gauss-newton", shape, n_terms, grid, opt, cfg, sym_step)


def flow_velocity(params, shape, grid, opt=OptimConfig(), cfg=DEFAULT_ROOT):
    """Parameter rates whose induced normal speed best matches the normal gap.

    Moving the parameters at rate q moves S_u with outward normal speed
    sum_p q_p (du/dp) / |grad u|. The target speed is D (r_hat . N), the
    radial gap projected on the outward normal. Solved as ridge-regularized
    least squares, uniform weight per angle, with the coefficient value
    penalty of the LM step so unresolvable P_k stay at zero.
    """
    residual, points = boundary_samples(params, shape, grid, cfg)
    rows = np.empty((len(points), 1 + params.n_terms))
    scale = opt.objective_scale
    target = np.empty(len(points))
    for j, p in enumerate(points):
        g = math.sqrt(p.grad_norm_sq)
        rows[j, 0] = p.u_rho / g
        rows[j, 1:] = p.basis / g
        target[j] = residual[j] * (-p.u_r / g)
    rows *= scale
    target *= scale
    n = rows.shape[1]
    s_max = float(np.linalg.norm(rows, 2))
    # rate ridge plus the same value penalty as the LM step, over one flow_dt
    lam = math.sqrt(opt.coeff_ridge) * s_max
    ridge = opt.ridge
    for _ in range(4):
        rate, rank = _augmented_solve(
            rows, target,
            [math.sqrt(ridge) * s_max * np.eye(n), lam * opt.flow_dt * np.eye(n)[1:]],
            [np.zeros(n), -lam * params.coeff_array],
        )
        if rank == n and np.all(np.isfinite(rate)):
            return rate
        ridge *= 10.0
    raise FitError("flow least-squares system is singular even after ridge increase")


def prescribed_c_step(params, shape, grid, opt=OptimConfig(), cfg=DEFAULT_ROOT, dt=None):
    """One explicit Euler step p <- p + dt * rate of the prescribed-velocity flow."""
    if dt is None:
        dt = opt.flow_dt
    rate = flow_velocity(params, shape, grid, opt, cfg)
    return LevelSetParams.from_vector(params.as_vector() + dt * rate, params.sym_step)


def _flow_stage(state, shape, grid, opt, cfg, budget, t0, trace):
    """Prescribed-velocity flow at a fixed coefficient penalty.

    dt halves when a step fails to lower the RMS and grows by 1.2 after a
    success, capped at ``opt.flow_dt``.
    """
    params, rms = state.params, state.rms
    sym_step = params.sym_step
    dt = opt.flow_dt
    failures = 0
    converged = False
    iteration = state.iteration
    rate = flow_velocity(params, shape, grid, opt, cfg)
    while iteration < budget:
        if rms < opt.objective_tol:
            converged = True
            break
        iteration += 1
        vec = params.as_vector()
        step = dt * rate
        if np.linalg.norm(step) <= opt.step_tol * (np.linalg.norm(vec) + opt.step_tol):
            converged = True
            break
        trial = LevelSetParams.from_vector(vec + step, sym_step)
        try:
            t_rms = objective_rms(trial, shape, grid, cfg)
        except LevelSetError as exc:
            failures += 1
            if failures >= MAX_ROOT_FAILURES:
                raise FitError(f"{failures} consecutive root failures: {exc}") from exc
            dt *= 0.5
            continue
        failures = 0
        if t_rms < rms:
            params, rms = trial, t_rms
            dt = min(1.2 * dt, opt.flow_dt)
            _monitor("flow", iteration, params, rms, t0, trace)
            rate = flow_velocity(params, shape, grid, opt, cfg)
        else:
            dt *= 0.5
    return _Stage(params, rms, iteration, converged)


def fit_flow(shape, n_terms, grid=QuadratureGrid(), opt=OptimConfig(), cfg=DEFAULT_ROOT,
             sym_step=None):
    """Iterate the prescribed-velocity flow from the unit-circle eigenfunction."""
    return _continuation(_flow_stage, "flow", shape, n_terms, grid, opt, cfg, sym_step)
