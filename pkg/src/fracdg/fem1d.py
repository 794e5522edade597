"""Piecewise-linear finite elements on (0, 1) with homogeneous Dirichlet data.

Degrees of freedom are the values at the interior nodes ``x_i = i h``,
``i = 1, ..., M-1``; boundary nodes are eliminated. All operators are
tridiagonal and stored by diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "CoefficientError",
    "CoefficientField",
    "SpaceGrid",
    "TimeLinear",
    "Tridiagonal",
    "h1_seminorm_error",
    "h1_seminorm_weighted",
    "interpolate",
    "l2_error",
    "l2_norm",
    "l2_time_project",
    "load_vector",
    "load_vectors",
    "mass_matrix",
    "ritz_project",
    "stiffness_matrix",
]


class CoefficientError(ValueError):
    """Diffusion coefficient outside its declared positive bounds."""


@lru_cache(maxsize=None)
def gauss_points(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform partition of (0, 1) into ``M`` elements."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"need at least 2 elements, got M={self.M}")

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def dof_count(self) -> int:
        return self.M - 1

    @property
    def nodes(self) -> np.ndarray:
        """All nodes including the two boundary points."""
        return np.linspace(0.0, 1.0, self.M + 1)

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def quadrature(self, npts: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-element Gauss points.

        Returns ``(x, w, s)`` with ``x`` and ``w`` of shape ``(M, npts)`` and
        ``s`` the reference coordinates in [0, 1].
        """
        s, w = gauss_points(npts)
        x = self.nodes[:-1, None] + self.h * s[None, :]
        return x, np.broadcast_to(self.h * w, x.shape), s

    def expand(self, w) -> np.ndarray:
        """Nodal values with the zero boundary values appended."""
        w = np.asarray(w, dtype=float)
        if w.shape[-1] != self.dof_count:
            raise ValueError(f"expected {self.dof_count} dofs, got {w.shape[-1]}")
        pad = [(0, 0)] * (w.ndim - 1) + [(1, 1)]
        return np.pad(w, pad)

    def values_at(self, w, npts: int) -> np.ndarray:
        """P1 interpolant of ``w`` at the per-element Gauss points."""
        full = self.expand(w)
        s, _ = gauss_points(npts)
        left, right = full[..., :-1, None], full[..., 1:, None]
        return left * (1.0 - s) + right * s


@dataclass(frozen=True)
class CoefficientField:
    """Diffusivity ``A(x, t)`` with bounds ``0 < a_min <= A <= a_max``.

    ``A`` must accept broadcasting numpy arrays.
    """

    A: Callable
    a_min: float
    a_max: float
    x_independent: bool = False

    def __post_init__(self):
        if not 0.0 < self.a_min <= self.a_max:
            raise ValueError("coefficient bounds must satisfy 0 < a_min <= a_max")

    def __call__(self, x, t):
        vals = np.asarray(self.A(x, t), dtype=float)
        vals = np.broadcast_to(vals, np.broadcast_shapes(np.shape(x), np.shape(t)))
        if np.any(vals <= 0.0) or np.any(vals < self.a_min) or np.any(vals > self.a_max):
            bad = vals[(vals < self.a_min) | (vals > self.a_max) | (vals <= 0.0)]
            raise CoefficientError(
                f"coefficient value {bad.flat[0]:.6g} at t={t} outside "
                f"[{self.a_min}, {self.a_max}]"
            )
        return vals


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix given by its sub-, main and super-diagonal."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.lower) != n - 1 or len(self.upper) != n - 1:
            raise ValueError("off-diagonals must have length n - 1")

    @property
    def n(self) -> int:
        return len(self.diag)

    @classmethod
    def symmetric(cls, diag, off) -> "Tridiagonal":
        off = np.asarray(off, dtype=float)
        return cls(off, np.asarray(diag, dtype=float), off)

    def __matmul__(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[..., 1:] += self.lower * v[..., :-1]
        out[..., :-1] += self.upper * v[..., 1:]
        return out

    def __add__(self, other: "Tridiagonal") -> "Tridiagonal":
        return Tridiagonal(self.lower + other.lower, self.diag + other.diag, self.upper + other.upper)

    def __mul__(self, c: float) -> "Tridiagonal":
        return Tridiagonal(c * self.lower, c * self.diag, c * self.upper)

    __rmul__ = __mul__

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def solve(self, rhs) -> np.ndarray:
        ab = np.zeros((3, self.n))
        ab[0, 1:] = self.upper
        ab[1] = self.diag
        ab[2, :-1] = self.lower
        return solve_banded((1, 1), ab, rhs)

    def quadratic_form(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(v @ (self @ v))


def mass_matrix(grid: SpaceGrid) -> Tridiagonal:
    """Exact P1 mass matrix."""
    n, h = grid.dof_count, grid.h
    return Tridiagonal.symmetric(np.full(n, 2.0 * h / 3.0), np.full(n - 1, h / 6.0))


def element_diffusivity(grid: SpaceGrid, t: float, A: CoefficientField, npts: int = 3) -> np.ndarray:
    """Per-element ``(1/h^2) int A(x, t) dx`` by ``npts``-point Gauss."""
    x, w, _ = grid.quadrature(npts)
    return (A(x, t) * w).sum(axis=1) / grid.h**2


def stiffness_matrix(grid: SpaceGrid, t: float, A: CoefficientField) -> Tridiagonal:
    """Weighted stiffness ``int A(x, t) phi_i' phi_j' dx`` (3-point Gauss per element)."""
    ke = element_diffusivity(grid, t, A)
    return Tridiagonal.symmetric(ke[:-1] + ke[1:], -ke[1:-1])


def load_vector(grid: SpaceGrid, g: Callable) -> np.ndarray:
    """``int g(x) phi_i(x) dx`` by 5-point Gauss per element."""
    x, w, s = grid.quadrature(5)
    gw = np.asarray(g(x), dtype=float) * w
    gw = np.broadcast_to(gw, x.shape)
    left = (gw * (1.0 - s)).sum(axis=1)  # contribution to the element's left node
    right = (gw * s).sum(axis=1)
    return left[1:] + right[:-1]


def load_vectors(grid: SpaceGrid, f: Callable, times) -> np.ndarray:
    """Load vectors of ``f(., t)`` for several times, shape ``(len(times), dofs)``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    x, w, s = grid.quadrature(5)
    vals = np.asarray(f(x[None, :, :], times[:, None, None]), dtype=float)
    gw = np.broadcast_to(vals, (len(times),) + x.shape) * w
    left = gw @ (1.0 - s)
    right = gw @ s
    return left[:, 1:] + right[:, :-1]


def interpolate(grid: SpaceGrid, v: Callable) -> np.ndarray:
    """Nodal interpolant of ``v`` at the interior nodes."""
    return np.asarray(v(grid.interior), dtype=float) * np.ones(grid.dof_count)


def ritz_project(
    grid: SpaceGrid,
    v: Callable,
    t: float,
    A: CoefficientField,
    dv: Callable | None = None,
) -> np.ndarray:
    """Elliptic projection: ``a(t, R_h v - v, chi) = 0`` for all ``chi`` in S_h.

    ``dv`` is the derivative ``v'``; if omitted it is approximated by
    central differences with step 1e-6.
    """
    if dv is None:
        eps = 1e-6

        def dv(x):
            return (np.asarray(v(x + eps)) - np.asarray(v(x - eps))) / (2.0 * eps)

    # same 3-point rule as the stiffness matrix, so S_h is reproduced exactly
    x, w, _ = grid.quadrature(3)
    flux = A(x, t) * np.asarray(dv(x), dtype=float) * w
    # phi_i' = +1/h on element i-1, -1/h on element i
    per_el = flux.sum(axis=1) / grid.h
    rhs = per_el[:-1] - per_el[1:]
    return stiffness_matrix(grid, t, A).solve(rhs)


def l2_norm(grid: SpaceGrid, w) -> float:
    """L2 norm of the P1 function with nodal values ``w``."""
    vals = grid.values_at(w, 5)
    _, wq, _ = grid.quadrature(5)
    return float(np.sqrt((vals**2 * wq).sum()))


def l2_error(grid: SpaceGrid, w, exact: Callable) -> float:
    """``||W - exact||`` with ``W`` the P1 interpolant of ``w`` (5-point Gauss)."""
    x, wq, _ = grid.quadrature(5)
    diff = grid.values_at(w, 5) - np.asarray(exact(x), dtype=float)
    return float(np.sqrt((diff**2 * wq).sum()))


def h1_seminorm_error(grid: SpaceGrid, w, dexact: Callable) -> float:
    """``||W' - exact'||`` (5-point Gauss)."""
    x, wq, _ = grid.quadrature(5)
    slope = np.diff(grid.expand(w)) / grid.h
    diff = slope[:, None] - np.asarray(dexact(x), dtype=float)
    return float(np.sqrt((diff**2 * wq).sum()))


def h1_seminorm_weighted(grid: SpaceGrid, w, t: float, A: CoefficientField) -> float:
    """Energy seminorm ``sqrt(a(t, W, W))``."""
    return float(np.sqrt(stiffness_matrix(grid, t, A).quadratic_form(w)))


@dataclass(frozen=True)
class TimeLinear:
    """Linear-in-time function ``mean + slope * (t - midpoint)`` on an interval."""

    interval: tuple[float, float]
    mean: np.ndarray
    slope: np.ndarray

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.interval[0] + self.interval[1])

    def __call__(self, t):
        return self.mean + self.slope * (t - self.midpoint)


def l2_time_project(v: Callable, interval, npts: int = 5) -> TimeLinear:
    """Local L2 projection onto linear polynomials in time.

    ``Pi v(t) = 12/k^3 (t - t_mid) int (s - t_mid) v(s) ds + 1/k int v(s) ds``,
    with both integrals by ``npts``-point Gauss. ``v`` may be scalar- or
    vector-valued.
    """
    a, b = map(float, interval)
    k = b - a
    mid = 0.5 * (a + b)
    s, w = gauss_points(npts)
    ts = a + k * s
    vals = np.array([np.asarray(v(t), dtype=float) for t in ts])
    wk = (k * w).reshape((-1,) + (1,) * (vals.ndim - 1))
    integral = (wk * vals).sum(axis=0)
    # offsets from the midpoint formed locally to avoid cancellation on short intervals
    first = (wk * (k * (s - 0.5)).reshape(wk.shape) * vals).sum(axis=0)
    return TimeLinear((a, b), integral / k, 12.0 / k**3 * first)
