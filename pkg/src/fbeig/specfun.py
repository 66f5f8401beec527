"""Bessel functions of the first kind: values, derivatives and zeros.

Values come from ``_kernels.jn_array``: an ascending power series for small
arguments and Miller's backward recurrence, normalized by
J_0 + 2*sum(J_2k) = 1, everywhere else.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import _kernels

MAX_ORDER = 128
MAX_ZERO_ORDER = 64
MAX_ZERO_INDEX = 64


class BesselDomainError(ValueError):
    """Order or argument outside the supported range."""


class BesselZeroError(ArithmeticError):
    """Zero search finished with an unacceptable residual."""


@dataclass(frozen=True)
class BesselEvalConfig:
    series_cutoff: float = 2.0
    miller_overshoot: int = 10
    abs_tol: float = 1e-13

    def __post_init__(self):
        if not self.series_cutoff > 0:
            raise ValueError("series_cutoff must be positive")
        if self.miller_overshoot < 10:
            raise ValueError("miller_overshoot must be at least 10")
        if not self.abs_tol >= np.finfo(float).eps:
            raise ValueError("abs_tol must be at least machine epsilon")


DEFAULT_CONFIG = BesselEvalConfig()


def _check(n, x):
    if n < 0 or n > MAX_ORDER or int(n) != n:
        raise BesselDomainError(f"order must be an integer in [0, {MAX_ORDER}], got {n}")
    if not math.isfinite(x) or x < 0:
        raise BesselDomainError(f"argument must be finite and nonnegative, got {x}")


def bessel_j_array(nmax, x, config=DEFAULT_CONFIG):
    """J_0(x) .. J_nmax(x) in one backward sweep."""
    _check(nmax, x)
    return _kernels.jn_array(int(nmax), float(x), config.miller_overshoot, config.series_cutoff)


def bessel_j(n, x, config=DEFAULT_CONFIG):
    """J_n(x) for integer order 0 <= n <= 128 and x >= 0."""
    return float(bessel_j_array(n, x, config)[n])


def bessel_j_prime(n, x, config=DEFAULT_CONFIG):
    """J_n'(x) from (J_{n-1} - J_{n+1}) / 2, with J_0' = -J_1."""
    _check(n, x)
    if n + 1 > MAX_ORDER:
        raise BesselDomainError(f"derivative needs order {n + 1} > {MAX_ORDER}")
    jn = _kernels.jn_array(int(n) + 1, float(x), config.miller_overshoot, config.series_cutoff)
    if n == 0:
        return float(-jn[1])
    return float(0.5 * (jn[n - 1] - jn[n + 1]))


def mcmahon_estimate(n, k):
    """Leading McMahon asymptotic for the k-th positive zero of J_n."""
    beta = (k + 0.5 * n - 0.25) * math.pi
    return beta - (4.0 * n * n - 1.0) / (8.0 * beta)


@lru_cache(maxsize=512)
def bessel_j_zero(n, k):
    """k-th positive zero of J_n.

    Consecutive zeros of J_n are more than 2 apart, so a unit-step scan
    brackets exactly one root per sign change; Newton from the McMahon
    estimate then refines inside that bracket, falling back to bisection
    whenever an iterate escapes.
    """
    if not (0 <= n <= MAX_ZERO_ORDER and int(n) == n):
        raise BesselDomainError(f"order must be an integer in [0, {MAX_ZERO_ORDER}]")
    if not (1 <= k <= MAX_ZERO_INDEX and int(k) == k):
        raise BesselDomainError(f"zero index must be an integer in [1, {MAX_ZERO_INDEX}]")

    def j(x):
        return bessel_j(n, x)

    # no zeros of J_n on (0, n] for n >= 1
    lo = max(float(n), 1.0)
    f_lo = j(lo)
    found = 0
    while True:
        hi = lo + 1.0
        f_hi = j(hi)
        if f_hi == 0.0:
            found += 1
            if found == k:
                return hi
            lo, f_lo = hi + 1e-9, j(hi + 1e-9)
            continue
        if f_lo * f_hi < 0:
            found += 1
            if found == k:
                break
        lo, f_lo = hi, f_hi

    x = min(max(mcmahon_estimate(n, k), lo), hi)
    for _ in range(100):
        fx = j(x)
        if fx == 0.0:
            break
        if f_lo * fx < 0:
            hi = x
        else:
            lo, f_lo = x, fx
        step = fx / bessel_j_prime(n, x)
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4 * np.finfo(float).eps * x_new:
            x = x_new
            break
        x = x_new

    if abs(j(x)) > 1e-11:
        raise BesselZeroError(f"zero ({n}, {k}) did not converge: |J_n| = {abs(j(x)):.3g}")
    return x
