"""Star-shaped target boundaries given in polar form r = R(theta)."""
from dataclasses import dataclass, field
import math

import numpy as np

MAX_SYMMETRY = 16


@dataclass(frozen=True)
class Ellipse:
    """Ellipse centred at the origin; ``a`` along x, ``b`` along y."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"semiaxes must be positive and finite, got a={self.a}, b={self.b}")

    def radius(self, theta):
        c = np.cos(theta)
        s = np.sin(theta)
        return 1.0 / np.sqrt(c * c / (self.a * self.a) + s * s / (self.b * self.b))


@dataclass(frozen=True)
class FourierBoundary:
    """R(theta) = r0 + sum_k c_k cos(k theta) + sum_k s_k sin(k theta), k from 1."""

    r0: float
    cos_coeffs: tuple = field(default=())
    sin_coeffs: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        theta = np.linspace(0.0, 2 * np.pi, 1024, endpoint=False)
        if not np.all(self.radius(theta) > 0):
            raise ValueError("Fourier boundary radius must be positive at every angle")

    def radius(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = np.full(theta.shape, float(self.r0))
        for k, c in enumerate(self.cos_coeffs, start=1):
            r = r + c * np.cos(k * theta)
        for k, s in enumerate(self.sin_coeffs, start=1):
            r = r + s * np.sin(k * theta)
        return r


def circle(radius=1.0):
    return Ellipse(radius, radius)


def shape_radius(shape, theta):
    """Boundary radius at angle(s) ``theta``; scalar in, float out."""
    r = shape.radius(theta)
    return float(r) if np.ndim(r) == 0 else r


def shape_symmetry(shape, max_step=MAX_SYMMETRY, n_test=720, tol=1e-12):
    """Largest s <= max_step with R(-theta) = R(theta) = R(theta + 2 pi / s).

    Returns 1 when no rotational symmetry is found, including shapes with no
    mirror symmetry about the x axis.
    """
    theta = np.linspace(0.0, 2 * np.pi, n_test, endpoint=False) + 0.1234
    base = shape.radius(theta)
    scale = max(1.0, float(np.max(np.abs(base))))
    if np.max(np.abs(shape.radius(-theta) - base)) > tol * scale:
        return 1
    for s in range(max_step, 1, -1):
        shifted = shape.radius(theta + 2 * np.pi / s)
        if np.max(np.abs(shifted - base)) <= tol * scale:
            return s
    return 1
