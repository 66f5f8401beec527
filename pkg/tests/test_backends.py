import os
import subprocess
import sys

import numpy as np
import pytest

from fbeig import _kernels, active_backend
from fbeig.domain import Ellipse
from fbeig.fitter import OptimConfig, fit_gauss_newton

BACKENDS = _kernels.backends()
needs_both = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled backend not built")


def _flat(value):
    if isinstance(value, tuple):
        return np.concatenate([np.ravel(np.asarray(v, dtype=float)) for v in value])
    return np.ravel(np.asarray(value, dtype=float))


@needs_both
def test_kernels_bitwise_equal():
    rng = np.random.default_rng(3)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for _ in range(50):
        n = int(rng.integers(0, 80))
        x = float(rng.uniform(0, 100))
        assert np.array_equal(py.jn_array(n, x, 10, 2.0), cy.jn_array(n, x, 10, 2.0))
        coeffs = rng.uniform(-0.5, 0.5, int(rng.integers(0, 8)))
        args = (float(rng.uniform(1, 6)), coeffs, int(rng.integers(1, 4)),
                float(rng.uniform(0, 1.5)), float(rng.uniform(0, 7)), 10, 2.0)
        assert np.array_equal(_flat(py.u_value_dr(*args)), _flat(cy.u_value_dr(*args)))
        assert np.array_equal(_flat(py.u_full(*args)), _flat(cy.u_full(*args)))
        assert py.miller_start(n, x, 10) == cy.miller_start(n, x, 10)
    r = rng.uniform(0, 1.5, 200)
    t = rng.uniform(0, 7, 200)
    assert np.array_equal(_flat(py.u_many(3.3, coeffs, 2, r, t, 10, 2.0)),
                          _flat(cy.u_many(3.3, coeffs, 2, r, t, 10, 2.0)))


@needs_both
def test_fit_identical_under_both_backends():
    results = {}
    for name in ("python", "cython"):
        old = _kernels.set_backend(name)
        try:
            assert active_backend() == name
            results[name] = fit_gauss_newton(Ellipse(0.5, 1.0), 4, opt=OptimConfig(hadamard=False))
        finally:
            _kernels.set_backend(old)
    assert results["python"].eigenvalue_raw == results["cython"].eigenvalue_raw
    assert results["python"].params == results["cython"].params


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, FBEIG_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import fbeig; print(fbeig.active_backend())"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
