"""Problem definitions for ``D^mu u - (A u_x)_x = f`` on (0, 1) x (0, T].

A :class:`ProblemSpec` carries the data the solver needs and, when known,
the exact solution and its derivatives used for error measurement and
self-checks. Problems are registered by name so run configurations can
refer to them as strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fem1d import CoefficientField, SpaceGrid, load_vectors, mass_matrix, stiffness_matrix
from .frackernel import caputo_power, check_order, omega, quadrature_oracle

__all__ = [
    "PROBLEMS",
    "ProblemSpec",
    "get_problem",
    "manufactured_example",
    "polynomial_probe",
    "register",
    "relaxation_problem",
    "residual",
]


@dataclass(frozen=True)
class ProblemSpec:
    """Data of one fractional diffusion problem.

    Callables of ``(x, t)`` must broadcast over numpy arrays. ``weak_load``,
    if set, replaces the pointwise forcing: it maps ``(grid, times)`` to
    the array of load vectors ``<f(t), phi_i>``.
    """

    name: str
    mu: float
    A: CoefficientField
    f: Callable
    u0: Callable
    T: float = 1.0
    du0: Callable | None = None
    exact: Callable | None = None
    exact_dx: Callable | None = None
    exact_dt: Callable | None = None
    elliptic: Callable | None = None  # -(A u_x)_x for the exact solution
    sigma: float | None = None
    singular_power: float | None = None  # f ~ t**singular_power as t -> 0
    weak_load: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        check_order(self.mu)
        if not self.T > 0.0:
            raise ValueError("final time must be positive")

    def loads(self, grid: SpaceGrid, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.weak_load is not None:
            return np.asarray(self.weak_load(grid, times), dtype=float)
        return load_vectors(grid, self.f, times)


PROBLEMS: dict[str, Callable[..., ProblemSpec]] = {}


def register(name: str):
    def deco(builder):
        PROBLEMS[name] = builder
        return builder

    return deco


def get_problem(name: str, **kwargs) -> ProblemSpec:
    """Build a registered problem by name."""
    try:
        builder = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(PROBLEMS)}") from None
    return builder(**kwargs)


def _growing_coefficient() -> CoefficientField:
    return CoefficientField(lambda x, t: 1.0 + np.power(t, 1.5) + 0.0 * x, 1.0, 2.0, x_independent=True)


@register("manufactured")
def manufactured_example(mu: float) -> ProblemSpec:
    """Manufactured solution ``u = (1 + t^(1-mu)) sin(pi x)`` with ``A = 1 + t^(3/2)``."""
    mu = check_order(mu)
    sigma = 1.0 - mu
    pi2 = math.pi**2

    def exact(x, t):
        return (1.0 + np.power(t, sigma)) * np.sin(np.pi * x)

    def exact_dx(x, t):
        return (1.0 + np.power(t, sigma)) * np.pi * np.cos(np.pi * x)

    def exact_dt(x, t):
        return sigma * np.power(t, -mu) * np.sin(np.pi * x)

    def elliptic(x, t):
        return pi2 * (1.0 + np.power(t, 1.5)) * exact(x, t)

    def f(x, t):
        t = np.asarray(t, dtype=float)
        # the Caputo term is undefined at t = 0; quadrature never samples it
        cap = np.where(t > 0.0, caputo_power(mu, sigma, np.where(t > 0.0, t, 1.0)), 0.0)
        return cap * np.sin(np.pi * x) + elliptic(x, t)

    return ProblemSpec(
        name="manufactured",
        mu=mu,
        A=_growing_coefficient(),
        f=f,
        u0=lambda x: np.sin(np.pi * x),
        du0=lambda x: np.pi * np.cos(np.pi * x),
        exact=exact,
        exact_dx=exact_dx,
        exact_dt=exact_dt,
        elliptic=elliptic,
        sigma=sigma,
        singular_power=1.0 - 2.0 * mu,
    )


@register("relaxation")
def relaxation_problem(mu: float) -> ProblemSpec:
    """Unforced decay from ``u0 = sin(pi x)`` with the coefficient of the manufactured example."""
    return ProblemSpec(
        name="relaxation",
        mu=check_order(mu),
        A=_growing_coefficient(),
        f=lambda x, t: 0.0 * x * t,
        u0=lambda x: np.sin(np.pi * x),
        du0=lambda x: np.pi * np.cos(np.pi * x),
    )


@register("zero")
def zero_problem(mu: float) -> ProblemSpec:
    return ProblemSpec(
        name="zero",
        mu=check_order(mu),
        A=CoefficientField(lambda x, t: 1.0 + 0.0 * x * t, 1.0, 1.0, x_independent=True),
        f=lambda x, t: 0.0 * x * t,
        u0=lambda x: 0.0 * x,
        du0=lambda x: 0.0 * x,
        exact=lambda x, t: 0.0 * x * t,
        exact_dx=lambda x, t: 0.0 * x * t,
    )


@register("probe")
def polynomial_probe(mu: float, grid: SpaceGrid, phi) -> ProblemSpec:
    """Exact solution ``t * Phi(x)`` with ``Phi`` the P1 function of ``phi``.

    The forcing is given weakly, ``<f(t), chi> = omega_{2-mu}(t) <Phi, chi>
    + t a(Phi, chi)``, so the exact solution lies in the discrete trial
    space and the scheme must reproduce it up to rounding.
    """
    mu = check_order(mu)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (grid.dof_count,):
        raise ValueError("phi must be a dof vector of the grid")
    A = CoefficientField(lambda x, t: 1.0 + 0.0 * x * t, 1.0, 1.0, x_independent=True)
    mphi = mass_matrix(grid) @ phi
    kphi = stiffness_matrix(grid, 0.0, A) @ phi
    nodes, full = grid.nodes, grid.expand(phi)

    def shape(x):
        return np.interp(x, nodes, full)

    def weak_load(g, times):
        if g != grid:
            raise ValueError("probe problem is tied to its construction grid")
        times = np.asarray(times, dtype=float)
        cap = np.where(times > 0.0, omega(2.0 - mu, np.maximum(times, 0.0)), 0.0)
        return cap[:, None] * mphi[None, :] + times[:, None] * kphi[None, :]

    def f(x, t):
        raise NotImplementedError("probe forcing is only defined weakly")

    return ProblemSpec(
        name="probe",
        mu=mu,
        A=A,
        f=f,
        u0=lambda x: 0.0 * x,
        du0=lambda x: 0.0 * x,
        exact=lambda x, t: t * shape(x),
        weak_load=weak_load,
    )


def caputo_by_quadrature(problem: ProblemSpec, x: float, t: float, tol: float = 1e-11) -> float:
    """Caputo derivative of the exact solution at ``(x, t)`` by the oracle.

    The time derivative is singular like ``s^(-mu)`` at ``s = 0`` for the
    manufactured problem and the kernel like ``(t - s)^(-mu)`` at ``s = t``, so
    the interval is split at its midpoint.
    """
    if problem.exact_dt is None:
        raise ValueError("problem has no exact time derivative")
    mu = problem.mu
    half = 0.5 * t

    def left(s):
        return omega(1.0 - mu, t - s) * problem.exact_dt(x, s)

    def right(r):
        # r = t - s, distance from the kernel singularity
        return omega(1.0 - mu, r) * problem.exact_dt(x, t - r)

    lo = quadrature_oracle(left, (0.0, half), "left", -mu, tol=tol, local=True)
    hi = quadrature_oracle(right, (half, t), "right", -mu, tol=tol, local=True)
    return lo + hi


def residual(problem: ProblemSpec, x: float, t: float, tol: float = 1e-11) -> float:
    """``D^mu u - (A u_x)_x - f`` for the exact solution, Caputo term by quadrature."""
    if problem.exact is None or problem.elliptic is None:
        raise ValueError("problem has no exact solution with elliptic term")
    return caputo_by_quadrature(problem, x, t, tol) + float(problem.elliptic(x, t)) - float(problem.f(x, t))
