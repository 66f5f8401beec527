"""Reference eigenvalues from a Shortley-Weller finite-difference Laplacian.

Independent of the Bessel/level-set machinery: only the target's polar
radius function is used. Second-order accurate, so two grids combine by
Richardson extrapolation into a 5-6 digit reference.
"""
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

MIN_INTERIOR_NODES = 100

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


class OracleError(RuntimeError):
    pass


@dataclass
class FDGrid:
    """Interior nodes of a uniform grid and their arm lengths to the boundary.

    ``arms[:, d]`` is the fraction of h to the neighbour in direction
    ``_DIRS[d]``: 1 when the neighbour is interior, otherwise the distance
    to the boundary crossing in (0, 1]. ``neighbours[:, d]`` holds the
    neighbour's node number, or -1 when the arm ends on the boundary.
    """

    h: float
    ij: np.ndarray
    arms: np.ndarray
    neighbours: np.ndarray = field(repr=False)

    @property
    def n_interior(self):
        return len(self.ij)


@dataclass
class OracleResult:
    eigenvalue_estimates: list
    extrapolated: float
    estimated_error: float


def _inside(shape, x, y):
    return np.hypot(x, y) < shape.radius(np.arctan2(y, x))


def _crossing_fraction(shape, x0, y0, dx, dy, iterations=64):
    """Fraction t in (0, 1] where (x0 + t dx, y0 + t dy) meets the boundary.

    Vectorized bisection on g(t) = |p(t)| - R(arg p(t)); g(0) < 0 <= g(1).
    """
    lo = np.zeros_like(x0)
    hi = np.ones_like(x0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        x = x0 + mid * dx
        y = y0 + mid * dy
        outside = np.hypot(x, y) >= shape.radius(np.arctan2(y, x))
        hi = np.where(outside, mid, hi)
        lo = np.where(outside, lo, mid)
    return hi


def build_grid(shape, h):
    theta = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
    reach = float(np.max(shape.radius(theta))) * 1.05
    n = int(math.ceil(reach / h)) + 1
    ax = np.arange(-n, n + 1)
    i, j = np.meshgrid(ax, ax, indexing="ij")
    mask = _inside(shape, i * h, j * h)
    ij = np.stack([i[mask], j[mask]], axis=1)
    if len(ij) < MIN_INTERIOR_NODES:
        raise OracleError(f"h = {h} leaves only {len(ij)} interior nodes (< {MIN_INTERIOR_NODES})")
    number = np.full(mask.shape, -1, dtype=np.int64)
    number[mask] = np.arange(len(ij))
    arms = np.ones((len(ij), 4))
    neighbours = np.empty((len(ij), 4), dtype=np.int64)
    for d, (di, dj) in enumerate(_DIRS):
        ni = ij[:, 0] + di
        nj = ij[:, 1] + dj
        neighbours[:, d] = number[ni + n, nj + n]
        out = neighbours[:, d] < 0
        if np.any(out):
            sel = np.nonzero(out)[0]
            arms[sel, d] = _crossing_fraction(
                shape, ij[sel, 0] * h, ij[sel, 1] * h,
                np.full(len(sel), di * h), np.full(len(sel), dj * h))
    return FDGrid(h, ij, arms, neighbours)


def assemble(grid):
    """Sparse matrix of -Laplacian with the Shortley-Weller stencil.

    Along each axis, with arm fractions a (forward) and b (backward),
    -u_xx ~ (2/h^2) [u_P/(a b) - u_+/(a (a+b)) - u_-/(b (a+b))]; boundary
    neighbours carry u = 0 and drop out.
    """
    h2 = grid.h * grid.h
    n = grid.n_interior
    node = np.arange(n)
    diag = np.zeros(n)
    rows, cols, vals = [node], [node], []
    for fwd, bwd in ((0, 1), (2, 3)):
        a = grid.arms[:, fwd]
        b = grid.arms[:, bwd]
        diag += 2.0 / (h2 * a * b)
        for d, near, far in ((fwd, a, b), (bwd, b, a)):
            nb = grid.neighbours[:, d]
            keep = nb >= 0
            rows.append(node[keep])
            cols.append(nb[keep])
            vals.append((-2.0 / (h2 * near * (near + far)))[keep])
    vals.insert(0, diag)
    return sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))


def inverse_power(matrix, shift=0.0, tol=1e-13, max_iter=1000, seed=0):
    """Eigenvalue of ``matrix`` closest to ``shift`` by inverse iteration."""
    n = matrix.shape[0]
    lu = spla.splu((matrix - shift * sp.identity(n, format="csc")).tocsc())
    rng = np.random.default_rng(seed)
    x = 1.0 + 0.01 * rng.random(n)
    x /= np.linalg.norm(x)
    lam = math.inf
    for _ in range(max_iter):
        y = lu.solve(x)
        lam_new = shift + float(x @ x) / float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    raise OracleError(f"inverse iteration did not reach tolerance {tol} in {max_iter} steps")


def fd_lowest_eigenvalue(shape, h, power_tol=1e-12, seed=0):
    matrix = assemble(build_grid(shape, h))
    # a rough pass, then a shifted pass for fast convergence
    rough = inverse_power(matrix, 0.0, tol=1e-3, seed=seed)
    return inverse_power(matrix, 0.95 * rough, tol=power_tol, seed=seed)


def richardson_extrapolate(estimates, order=2):
    """Combine (h, lambda_h) pairs at h and h/2 to cancel the h**order term."""
    if len(estimates) < 2:
        raise ValueError("need at least two estimates")
    ests = sorted(estimates, key=lambda e: -e[0])
    for (h1, _), (h2, _) in zip(ests, ests[1:]):
        if not math.isclose(h1, 2 * h2, rel_tol=1e-9):
            raise ValueError(f"grid spacings must halve: got {h1} then {h2}")
    (_, coarse), (_, fine) = ests[-2], ests[-1]
    factor = 2**order - 1
    diff = fine - coarse
    return OracleResult(
        eigenvalue_estimates=[(float(h), float(lam)) for h, lam in ests],
        extrapolated=fine + diff / factor,
        estimated_error=max(abs(diff) / factor, np.finfo(float).tiny),
    )


def oracle_eigenvalue(shape, hs=(0.02, 0.01), power_tol=1e-12, seed=0):
    return richardson_extrapolate([(h, fd_lowest_eigenvalue(shape, h, power_tol, seed)) for h in hs])
