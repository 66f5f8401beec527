# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Bessel J_n arrays and level-set field evaluation.

Same signatures and semantics as ``_pykernel``.
"""
import numpy as np

from libc.math cimport cos, sin, fabs, pow, fmax
from libc.stdlib cimport malloc, free

cdef double _BIG = 1e250
cdef double _SMALL = 1e-250


cdef inline int _start(int nmax, double x, int overshoot) noexcept nogil:
    cdef double top = fmax(<double>nmax, x) + 15.0 * pow(fmax(x, 2.0) * 0.5, 1.0 / 3.0)
    cdef int start = <int>top + overshoot
    return start + (start & 1)


def miller_start(int nmax, double x, int overshoot):
    """Starting order for the backward recurrence."""
    return _start(nmax, x, overshoot)


cdef double _series(int n, double x) noexcept nogil:
    cdef double half = 0.5 * x
    cdef double term = 1.0
    cdef double q, total
    cdef int i, k
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
        if fabs(term) <= 1e-17 * fabs(total):
            break
        k += 1
    return total


cdef void _jn_fill(int nmax, double x, int overshoot, double cutoff, double* out) noexcept nogil:
    cdef int n, k, start, i
    cdef double two_over_x, f, f_next, f_prev, norm
    for n in range(nmax + 1):
        out[n] = 0.0
    if x == 0.0:
        out[0] = 1.0
        return
    if x < cutoff:
        for n in range(nmax + 1):
            out[n] = _series(n, x)
        return
    start = _start(nmax, x, overshoot)
    two_over_x = 2.0 / x
    f_next = 0.0
    f = _SMALL
    norm = 0.0
    k = start
    while k > 0:
        if k <= nmax:
            out[k] = f
        if (k & 1) == 0:
            norm += 2.0 * f
        f_prev = k * two_over_x * f - f_next
        f_next = f
        f = f_prev
        if fabs(f) > _BIG:
            f *= _SMALL
            f_next *= _SMALL
            norm *= _SMALL
            for i in range(k, nmax + 1):
                out[i] *= _SMALL
        k -= 1
    out[0] = f
    norm += f
    for n in range(nmax + 1):
        out[n] /= norm


def jn_array(int nmax, double x, int overshoot, double cutoff):
    """Return [J_0(x), ..., J_nmax(x)] as a float64 array."""
    out = np.empty(nmax + 1)
    cdef double[::1] view = out
    _jn_fill(nmax, x, overshoot, cutoff, &view[0])
    return out


cdef inline double* _alloc(int n) except NULL:
    cdef double* p = <double*>malloc(n * sizeof(double))
    if p == NULL:
        raise MemoryError()
    return p


def u_value_dr(double rho, const double[::1] coeffs, int sym, double r,
               double theta, int overshoot, double cutoff):
    """Return (u, du/dr) at one polar point."""
    cdef int n = coeffs.shape[0]
    cdef int top = n * sym + 1
    cdef double* jn = _alloc(top + 1)
    cdef double u, dj, c, pk
    cdef int k, m
    try:
        _jn_fill(top, rho * r, overshoot, cutoff, jn)
        u = jn[0]
        dj = -jn[1]
        for k in range(1, n + 1):
            m = k * sym
            c = cos(m * theta)
            pk = coeffs[k - 1]
            u += pk * jn[m] * c
            dj += pk * 0.5 * (jn[m - 1] - jn[m + 1]) * c
    finally:
        free(jn)
    return u, rho * dj


def u_full(double rho, const double[::1] coeffs, int sym, double r,
           double theta, int overshoot, double cutoff):
    """Return (u, u_r, u_theta, u_rho, basis) at one polar point."""
    cdef int n = coeffs.shape[0]
    cdef int top = n * sym + 1
    cdef double* jn = _alloc(top + 1)
    basis_arr = np.empty(n)
    cdef double[::1] basis = basis_arr
    cdef double u, dj, u_theta, c, s, pk
    cdef int k, m
    try:
        _jn_fill(top, rho * r, overshoot, cutoff, jn)
        u = jn[0]
        dj = -jn[1]
        u_theta = 0.0
        for k in range(1, n + 1):
            m = k * sym
            c = cos(m * theta)
            s = sin(m * theta)
            pk = coeffs[k - 1]
            basis[k - 1] = jn[m] * c
            u += pk * jn[m] * c
            dj += pk * 0.5 * (jn[m - 1] - jn[m + 1]) * c
            u_theta -= pk * m * jn[m] * s
    finally:
        free(jn)
    return u, rho * dj, u_theta, r * dj, basis_arr


def u_many(double rho, const double[::1] coeffs, int sym, r, theta,
           int overshoot, double cutoff):
    """Vectorized u over paired arrays of radii and angles."""
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=np.float64).ravel()
    cdef double[::1] tv = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    cdef Py_ssize_t npts = rv.shape[0]
    cdef int n = coeffs.shape[0]
    cdef int top = n * sym
    out_arr = np.empty(npts)
    cdef double[::1] out = out_arr
    cdef double* jn = _alloc(top + 1)
    cdef Py_ssize_t i
    cdef int k
    cdef double u
    try:
        for i in range(npts):
            _jn_fill(top, rho * rv[i], overshoot, cutoff, jn)
            u = jn[0]
            for k in range(1, n + 1):
                u += coeffs[k - 1] * jn[k * sym] * cos(k * sym * tv[i])
            out[i] = u
    finally:
        free(jn)
    return out_arr
