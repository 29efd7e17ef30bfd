"""Point charge above a grounded plane by the method of images.

The plane is z = 0 and the charge q sits at (0, 0, d). Units are those of
the Laplacian Green function: nabla^2 F = delta, F = -1/(4 pi r), and the
potential of a charge q is q/(4 pi r).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, OutOfDomain, SingularPoint

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class ImageProblem:
    charge: float
    height: float

    def __post_init__(self):
        q, d = float(self.charge), float(self.height)
        if not math.isfinite(q):
            raise InvalidInput(f"charge must be finite, got {self.charge!r}")
        if not (math.isfinite(d) and d > 0):
            raise InvalidInput(f"height must be > 0, got {self.height!r}")
        object.__setattr__(self, "charge", q)
        object.__setattr__(self, "height", d)

    @property
    def source(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.height])

    @property
    def image(self) -> np.ndarray:
        return np.array([0.0, 0.0, -self.height])


@dataclass(frozen=True)
class GreenEval:
    fundamental: float
    harmonic_correction: float
    green: float


def _point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise InvalidInput(f"expected a 3-vector, got shape {arr.shape}")
    return arr


def _mirror(p: np.ndarray) -> np.ndarray:
    return np.array([p[0], p[1], -p[2]])


def fundamental_solution_3d(x, source) -> float:
    x, source = _point(x), _point(source)
    r = float(np.linalg.norm(x - source))
    if r == 0.0:
        raise SingularPoint(f"fundamental solution is singular at the source {tuple(source)}")
    return -1.0 / (FOUR_PI * r)


def green_halfspace(x, source) -> GreenEval:
    """Dirichlet Green function of the half-space z > 0.

    ``x`` may lie on the plane itself, where G is exactly zero.
    """
    x, source = _point(x), _point(source)
    if x[2] < 0 or source[2] <= 0:
        raise OutOfDomain(f"points must lie in the upper half-space: x={tuple(x)}, source={tuple(source)}")
    f = fundamental_solution_3d(x, source)
    h = 1.0 / (FOUR_PI * float(np.linalg.norm(x - _mirror(source))))
    return GreenEval(fundamental=f, harmonic_correction=h, green=f + h)


def potential_charge_above_plane(problem: ImageProblem, x) -> float:
    """q/(4 pi) (1/|x - (0,0,d)| - 1/|x - (0,0,-d)|)."""
    x = _point(x)
    if x[2] < 0:
        raise OutOfDomain(f"potential is defined for z >= 0, got {tuple(x)}")
    r1 = math.sqrt(x[0] * x[0] + x[1] * x[1] + (x[2] - problem.height) ** 2)
    r2 = math.sqrt(x[0] * x[0] + x[1] * x[1] + (x[2] + problem.height) ** 2)
    if r1 == 0.0:
        raise SingularPoint("potential evaluated at the charge location")
    return problem.charge / FOUR_PI * (1.0 / r1 - 1.0 / r2)


def potential_from_green(problem: ImageProblem, x) -> float:
    """Same potential written as -q G(x, source), i.e. G convolved with the source."""
    return -problem.charge * green_halfspace(x, problem.source).green


def plane_potential_grid(problem: ImageProblem, grid_extent: float, grid_points: int):
    """Potential sampled on a uniform grid_points x grid_points grid of z = 0."""
    if not (math.isfinite(grid_extent) and grid_extent > 0):
        raise InvalidInput(f"grid extent must be positive, got {grid_extent!r}")
    if grid_points < 1:
        raise InvalidInput(f"grid_points must be >= 1, got {grid_points!r}")
    axis = np.linspace(-grid_extent, grid_extent, grid_points)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    z = np.zeros_like(gx)
    d = problem.height
    r1 = np.sqrt(gx * gx + gy * gy + (z - d) ** 2)
    r2 = np.sqrt(gx * gx + gy * gy + (z + d) ** 2)
    return gx, gy, problem.charge / FOUR_PI * (1.0 / r1 - 1.0 / r2)


def boundary_residual(problem: ImageProblem, grid_extent: float, grid_points: int) -> float:
    """max |V| over the grounded plane."""
    _, _, v = plane_potential_grid(problem, grid_extent, grid_points)
    return float(np.max(np.abs(v)))


def stencil_laplacian(problem: ImageProblem, x, h: float) -> float:
    """7-point finite-difference Laplacian of the potential at x."""
    x = _point(x)
    total = -6.0 * potential_charge_above_plane(problem, x)
    for axis in range(3):
        for sign in (1.0, -1.0):
            p = x.copy()
            p[axis] += sign * h
            total += potential_charge_above_plane(problem, p)
    return total / (h * h)
