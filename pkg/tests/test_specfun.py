import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fbeig.specfun import (
    BesselDomainError,
    BesselEvalConfig,
    bessel_j,
    bessel_j_array,
    bessel_j_prime,
    bessel_j_zero,
    mcmahon_estimate,
)


def series_j(n, x, terms=40):
    """Plain ascending series, independent of the library."""
    half = x / 2
    return sum((-1) ** m * half ** (2 * m + n) / (math.factorial(m) * math.factorial(m + n))
               for m in range(terms))


def bisect_zero(f, lo, hi):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


J01_ORACLE = bisect_zero(lambda x: series_j(0, x), 2.0, 3.0)
J11_ORACLE = bisect_zero(lambda x: series_j(1, x), 3.0, 4.5)


def test_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0
    assert bessel_j_prime(0, 0.0) == 0.0
    assert bessel_j_prime(1, 0.0) == 0.5


def test_j0_vanishes_at_series_oracle_zero():
    assert abs(J01_ORACLE - 2.404825557695773) < 1e-14
    assert abs(bessel_j(0, 2.404825557695773)) <= 1e-13


def test_zeros_match_series_bisection():
    assert abs(bessel_j_zero(0, 1) - J01_ORACLE) <= 1e-12
    assert abs(bessel_j_zero(1, 1) - J11_ORACLE) <= 1e-12


def test_zero_interlacing():
    assert bessel_j_zero(0, 1) < bessel_j_zero(1, 1) < bessel_j_zero(0, 2)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
def test_small_argument_values_match_series(n):
    for x in np.linspace(0.05, 3.0, 25):
        assert abs(bessel_j(n, x) - series_j(n, x)) <= 1e-15


def test_values_match_mpmath_over_supported_range():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(400):
        n = int(rng.integers(0, 129))
        x = float(rng.uniform(0.0, 100.0))
        worst = max(worst, abs(bessel_j(n, x) - float(mpmath.besselj(n, x))))
    assert worst <= 1e-13


def test_array_matches_scalar():
    arr = bessel_j_array(30, 17.3)
    # the recurrence start depends on nmax, so agreement is to rounding only
    assert max(abs(arr[n] - bessel_j(n, 17.3)) for n in range(31)) <= 1e-15


def test_derivative_example_fd():
    step = 1e-5
    fd = (bessel_j(2, 1.7 + step) - bessel_j(2, 1.7 - step)) / (2 * step)
    assert abs(bessel_j_prime(2, 1.7) - fd) <= 1e-8


def test_derivative_matches_mpmath():
    for n, x in [(0, 3.3), (1, 0.4), (7, 12.0), (40, 55.5)]:
        assert abs(bessel_j_prime(n, x) - float(mpmath.besselj(n, x, derivative=1))) <= 1e-13


def test_zero_contract_n_and_k_up_to_10():
    for n in range(11):
        for k in range(1, 11):
            assert abs(bessel_j(n, bessel_j_zero(n, k))) <= 1e-11


def test_zeros_match_mpmath():
    for n, k in [(0, 1), (0, 20), (3, 7), (10, 10), (25, 3), (64, 64)]:
        assert abs(bessel_j_zero(n, k) - float(mpmath.besseljzero(n, k))) <= 1e-12


def test_mcmahon_estimate_is_close_for_large_k():
    assert abs(mcmahon_estimate(0, 30) - bessel_j_zero(0, 30)) < 1e-4


@pytest.mark.parametrize("n, x", [(-1, 1.0), (129, 1.0), (0, -0.5), (2, math.inf), (2, math.nan), (1.5, 1.0)])
def test_domain_errors(n, x):
    with pytest.raises(BesselDomainError):
        bessel_j(n, x)


@pytest.mark.parametrize("n, k", [(65, 1), (0, 0), (0, 65)])
def test_zero_domain_errors(n, k):
    with pytest.raises(BesselDomainError):
        bessel_j_zero(n, k)


def test_config_validation():
    with pytest.raises(ValueError):
        BesselEvalConfig(series_cutoff=0.0)
    with pytest.raises(ValueError):
        BesselEvalConfig(miller_overshoot=9)
    with pytest.raises(ValueError):
        BesselEvalConfig(abs_tol=1e-20)


def test_config_choice_does_not_change_values():
    alt = BesselEvalConfig(series_cutoff=0.5, miller_overshoot=30)
    for n, x in [(0, 1.0), (4, 7.5), (20, 3.0), (60, 80.0)]:
        assert abs(bessel_j(n, x, alt) - bessel_j(n, x)) <= 1e-15


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.floats(0.1, 50.0))
def test_recurrence_property(n, x):
    jn = bessel_j(n, x)
    err = abs(bessel_j(n - 1, x) + bessel_j(n + 1, x) - 2 * n / x * jn)
    assert err <= 1e-11 * max(1.0, abs(jn) * 2 * n / x)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 50.0))
def test_normalization_identity(x):
    total = bessel_j(0, x) + 2 * sum(bessel_j(2 * k, x) for k in range(1, 64))
    assert abs(total - 1.0) <= 1e-11


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 60), st.floats(0.1, 90.0))
def test_derivative_vs_fd_property(n, x):
    step = 1e-5
    fd = (bessel_j(n, x + step) - bessel_j(n, x - step)) / (2 * step)
    assert abs(bessel_j_prime(n, x) - fd) <= 1e-7
