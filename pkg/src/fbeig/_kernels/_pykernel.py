"""Pure-Python reference kernels.

Mirrors ``_ckernel.pyx`` function for function. Used when the compiled
extension is unavailable or when ``FBEIG_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np

_BIG = 1e250
_SMALL = 1e-250


def miller_start(nmax, x, overshoot):
    """Starting order for the backward recurrence.

    Past the turning point n ~ x the Bessel functions decay like an Airy
    function with scale (x/2)**(1/3); 15 such units put J_start near 1e-17.
    """
    top = max(float(nmax), x) + 15.0 * math.pow(max(x, 2.0) * 0.5, 1.0 / 3.0)
    start = int(top) + overshoot
    return start + (start & 1)


def _series(n, x):
    half = 0.5 * x
    term = 1.0
    for i in range(1, n + 1):
        term *= half / i
    if term == 0.0:
        return 0.0
    q = -half * half
    total = term
    k = 1
    while True:
        term *= q / (k * (k + n))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        k += 1
    return total


def _jn_list(nmax, x, overshoot, cutoff):
    out = [0.0] * (nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x < cutoff:
        return [_series(n, x) for n in range(nmax + 1)]

    start = miller_start(nmax, x, overshoot)
    two_over_x = 2.0 / x
    f_next = 0.0
    f = _SMALL
    norm = 0.0
    for k in range(start, 0, -1):
        if k <= nmax:
            out[k] = f
        if not k & 1:
            norm += 2.0 * f
        f_prev = k * two_over_x * f - f_next
        f_next = f
        f = f_prev
        if abs(f) > _BIG:
            f *= _SMALL
            f_next *= _SMALL
            norm *= _SMALL
            for i in range(k, nmax + 1):
                out[i] *= _SMALL
    out[0] = f
    norm += f
    return [v / norm for v in out]


def jn_array(nmax, x, overshoot, cutoff):
    """Return [J_0(x), ..., J_nmax(x)] as a float64 array."""
    return np.array(_jn_list(nmax, x, overshoot, cutoff))


def _orders_needed(n_coeffs, sym):
    return n_coeffs * sym + 1


def u_value_dr(rho, coeffs, sym, r, theta, overshoot, cutoff):
    """Return (u, du/dr) at one polar point."""
    coeffs = [float(c) for c in coeffs]
    n = len(coeffs)
    x = rho * r
    jn = _jn_list(_orders_needed(n, sym), x, overshoot, cutoff)
    u = jn[0]
    dj = -jn[1]
    for k in range(1, n + 1):
        m = k * sym
        c = math.cos(m * theta)
        pk = coeffs[k - 1]
        u += pk * jn[m] * c
        dj += pk * 0.5 * (jn[m - 1] - jn[m + 1]) * c
    return u, rho * dj


def u_full(rho, coeffs, sym, r, theta, overshoot, cutoff):
    """Return (u, u_r, u_theta, u_rho, basis) at one polar point.

    ``basis[k-1]`` is the partial derivative of u with respect to P_k.
    """
    coeffs = [float(c) for c in coeffs]
    n = len(coeffs)
    x = rho * r
    jn = _jn_list(_orders_needed(n, sym), x, overshoot, cutoff)
    basis = [0.0] * n
    u = jn[0]
    dj = -jn[1]
    u_theta = 0.0
    for k in range(1, n + 1):
        m = k * sym
        c = math.cos(m * theta)
        s = math.sin(m * theta)
        pk = coeffs[k - 1]
        basis[k - 1] = jn[m] * c
        u += pk * jn[m] * c
        dj += pk * 0.5 * (jn[m - 1] - jn[m + 1]) * c
        u_theta -= pk * m * jn[m] * s
    return u, rho * dj, u_theta, r * dj, np.array(basis)


def u_many(rho, coeffs, sym, r, theta, overshoot, cutoff):
    """Vectorized u over paired arrays of radii and angles."""
    r = np.ascontiguousarray(r, dtype=float).ravel().tolist()
    theta = np.ascontiguousarray(theta, dtype=float).ravel().tolist()
    coeffs = [float(c) for c in coeffs]
    out = np.empty(len(r))
    n = len(coeffs)
    for i in range(len(r)):
        jn = _jn_list(n * sym, rho * r[i], overshoot, cutoff)
        u = jn[0]
        for k in range(1, n + 1):
            u += coeffs[k - 1] * jn[k * sym] * math.cos(k * sym * theta[i])
        out[i] = u
    return out
