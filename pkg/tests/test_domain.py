import math

import numpy as np
import pytest

from fbeig.domain import MAX_SYMMETRY, Ellipse, FourierBoundary, circle, shape_radius, shape_symmetry


def test_ellipse_axes(ellipse):
    assert shape_radius(ellipse, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert shape_radius(ellipse, math.pi / 2) == pytest.approx(1.0, abs=1e-15)


def test_unit_circle_radius_is_one():
    theta = np.linspace(-7, 7, 101)
    assert np.allclose(shape_radius(circle(1.0), theta), 1.0, rtol=0, atol=1e-15)


def test_scalar_in_float_out(ellipse):
    assert isinstance(shape_radius(ellipse, 0.3), float)


def test_fourier_radius_formula():
    s = FourierBoundary(1.0, [0.1, 0.0, 0.05], [0.02])
    t = 0.7
    expect = 1.0 + 0.1 * math.cos(t) + 0.05 * math.cos(3 * t) + 0.02 * math.sin(t)
    assert shape_radius(s, t) == pytest.approx(expect, abs=1e-15)


@pytest.mark.parametrize("shape", [Ellipse(0.5, 1.0), FourierBoundary(1.0, [0.1, 0.2], [0.05, 0.0, 0.1])])
def test_periodicity(shape):
    theta = np.linspace(0, 2 * np.pi, 257)
    assert np.allclose(shape.radius(theta), shape.radius(theta + 2 * np.pi), rtol=1e-14, atol=0)


def test_ellipse_reflections(ellipse):
    theta = np.linspace(0, 2 * np.pi, 401)
    r = ellipse.radius(theta)
    assert np.max(np.abs(r - ellipse.radius(-theta))) <= 1e-14
    assert np.max(np.abs(r - ellipse.radius(np.pi - theta))) <= 1e-14


@pytest.mark.parametrize("shape", [Ellipse(0.5, 1.0), Ellipse(3.0, 0.01), FourierBoundary(1.0, [0.4, 0.3, 0.2])])
def test_positivity(shape):
    assert np.all(shape.radius(np.linspace(0, 2 * np.pi, 4096, endpoint=False)) > 0)


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (-1.0, 1.0), (1.0, math.inf), (math.nan, 1.0)])
def test_bad_ellipse(a, b):
    with pytest.raises(ValueError):
        Ellipse(a, b)


def test_nonpositive_fourier_boundary_rejected():
    with pytest.raises(ValueError):
        FourierBoundary(1.0, [1.2])


def test_symmetry_detection():
    assert shape_symmetry(Ellipse(0.5, 1.0)) == 2
    assert shape_symmetry(circle(1.0)) == MAX_SYMMETRY
    assert shape_symmetry(FourierBoundary(1.0, [0, 0, 0.1])) == 3
    assert shape_symmetry(FourierBoundary(1.0, [0, 0.1, 0, 0.05])) == 2
    assert shape_symmetry(FourierBoundary(1.0, [0.1, 0.1])) == 1


def test_no_mirror_symmetry_gives_one():
    assert shape_symmetry(FourierBoundary(1.0, [], [0, 0, 0.1])) == 1
