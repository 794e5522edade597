"""Seeded verification suite: oracles, projections, solver consistency, lemmas."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..dgstepper import run
from ..fem1d import (
    CoefficientField,
    SpaceGrid,
    gauss_points,
    l2_time_project,
    mass_matrix,
    ritz_project,
    stiffness_matrix,
)
from ..frackernel import kernel_moment, omega, quadrature_oracle
from ..problems import get_problem, polynomial_probe
from ..timemesh import graded_mesh
from .lemmas import ScalarDG, continuity_case, identity_case, positivity_case, random_dg
from .study import fine_grid_error

__all__ = [
    "CHECKS",
    "Verdict",
    "check_continuity",
    "check_identity",
    "check_kernel_oracle",
    "check_positivity",
    "check_probe",
    "check_projection",
    "check_ritz",
    "check_stability",
    "stability_ratios",
    "verify_suite",
]

ALPHAS = (0.3, 0.5, 0.7)


@dataclass
class Verdict:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""

    def format(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        line = f"{flag}  {self.name}: {self.value:.3e} (limit {self.limit:.1e})"
        return f"{line}  {self.detail}" if self.detail else line


def kernel_cases(n: int = 200, seed: int = 0):
    """Random ``(interval, a, beta, q)`` with lengths in 1e-4..1 and ``a <= t_left``."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        beta = rng.uniform(0.01, 2.0)
        q = int(rng.integers(0, 3))
        k = 10.0 ** rng.uniform(-4.0, 0.0)
        tl = rng.uniform(0.0, 2.0)
        x = 0.0 if rng.random() < 0.4 else 10.0 ** rng.uniform(-6.0, 0.5)
        yield (tl, tl + k), tl - x, beta, q


def check_kernel_oracle(n: int = 200, seed: int = 0, limit: float = 1e-10) -> Verdict:
    """Closed-form kernel moments against the graded quadrature oracle."""
    worst = 0.0
    for (tl, tr), a, beta, q in kernel_cases(n, seed):
        k, x = tr - tl, tl - a
        exact = kernel_moment((tl, tr), a, beta, q)
        ref = quadrature_oracle(
            lambda s: (s / k) ** q * omega(beta, x + s), (tl, tr), "left", beta - 1.0, tol=1e-13, local=True
        )
        worst = max(worst, abs(exact - ref) / abs(ref))
    return Verdict("kernel moments vs oracle", worst <= limit, worst, limit, f"{n} cases")


def check_projection(n: int = 50, seed: int = 1, limit: float = 1e-13) -> Verdict:
    """The local L2 time projection reproduces vector-valued linear functions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a = rng.uniform(0.0, 1.0)
        b = a + 10.0 ** rng.uniform(-3.0, 0.0)
        c0, c1 = rng.normal(size=5), rng.normal(size=5)
        proj = l2_time_project(lambda t: c0 + c1 * t, (a, b))
        for t in np.linspace(a, b, 7):
            exact = c0 + c1 * t
            worst = max(worst, np.abs(proj(t) - exact).max() / max(1.0, np.abs(exact).max()))
    return Verdict("time projection exact on linears", worst <= limit, worst, limit, f"{n} cases")


def check_ritz(n: int = 20, seed: int = 2, limit: float = 1e-12) -> Verdict:
    """``R_h chi = chi`` for ``chi`` in the P1 space, with x-dependent diffusivity."""
    rng = np.random.default_rng(seed)
    A = CoefficientField(lambda x, t: 1.0 + x**2 + 0.5 * np.sin(3.0 * x) * t, 0.5, 2.5)
    worst = 0.0
    for _ in range(n):
        grid = SpaceGrid(int(rng.integers(4, 65)))
        chi = rng.normal(size=grid.dof_count)
        full = grid.expand(chi)
        slopes = np.diff(full) / grid.h

        def v(x):
            return np.interp(x, grid.nodes, full)

        def dv(x):
            el = np.clip((np.asarray(x) / grid.h).astype(int), 0, grid.M - 1)
            return slopes[el]

        got = ritz_project(grid, v, rng.uniform(0.0, 1.0), A, dv)
        worst = max(worst, np.abs(got - chi).max() / np.abs(chi).max())
    return Verdict("Ritz projection fixes S_h", worst <= limit, worst, limit, f"{n} cases")


def check_probe(mu: float = 0.5, limit: float = 1e-9, seed: int = 3) -> Verdict:
    """Exact solution ``t * Phi(x)`` in the trial space is reproduced."""
    rng = np.random.default_rng(seed)
    grid = SpaceGrid(16)
    phi = rng.normal(size=grid.dof_count)
    problem = polynomial_probe(mu, grid, phi)
    mesh = graded_mesh(12, 2.0)
    sol = run(problem, mesh, grid)
    err = fine_grid_error(sol, problem.exact, 10, "both")
    return Verdict(f"trial-space probe (mu={mu})", err <= limit, err, limit)


def check_identity(n: int = 50, points: int = 50, seed: int = 4, limit: float = 1e-8) -> Verdict:
    """``I^mu(^R D^mu v) = v`` for random scalar DG functions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        v = random_dg(rng)
        mu = rng.uniform(0.05, 0.95)
        worst = max(worst, identity_case(v, mu, rng.uniform(0.0, v.nodes[-1], points)))
    return Verdict("I^mu D^mu v = v", worst <= limit, worst, limit, f"{n} functions x {points} points")


def _cases(rng, n, pair=False):
    for _ in range(n):
        T = rng.uniform(0.5, 2.0)
        v = random_dg(rng, T=T, continuous=True)
        if not pair:
            yield v
        else:
            w = random_dg(rng, N=v.N, T=T, continuous=True)
            yield v, ScalarDG(v.nodes, w.right, w.left)


def check_positivity(alpha: float, n: int = 100, seed: int = 5, tol: float = 1e-10) -> Verdict:
    """Coercivity of ``^R D^alpha`` with its explicit constant; value is the violation count."""
    rng = np.random.default_rng([seed, int(round(alpha * 1000))])
    bad, margin = 0, math.inf
    for v in _cases(rng, n):
        lhs, rhs = positivity_case(v, alpha, tol)
        bad += lhs < rhs
        margin = min(margin, (lhs - rhs) / abs(lhs))
    return Verdict(
        f"positivity alpha={alpha}", bad == 0, float(bad), 0.0, f"{n} cases, min relative margin {margin:.2e}"
    )


def check_continuity(alpha: float, n: int = 100, seed: int = 6, tol: float = 1e-10) -> Verdict:
    """Cauchy-Schwarz bound for ``I^alpha`` with ``sec^2``; value is the violation count."""
    rng = np.random.default_rng([seed, int(round(alpha * 1000))])
    bad, margin = 0, math.inf
    for v, w in _cases(rng, n, pair=True):
        lhs, rhs = continuity_case(v, w, alpha, tol)
        bad += lhs > rhs
        margin = min(margin, (rhs - lhs) / rhs)
    return Verdict(
        f"continuity alpha={alpha}", bad == 0, float(bad), 0.0, f"{n} cases, min relative margin {margin:.2e}"
    )


def stability_ratios(mu: float, n_list=(10, 20, 40, 80, 160), gamma: float = 2.0, M: int = 32) -> list[float]:
    """``int ||U||_1^2 dt / (T^(1-mu) ||U0||^2)`` for the unforced relaxation problem.

    ``||.||_1`` is the full H1 norm; the time integral uses 3-point Gauss
    per interval, exact for the quadratic integrand.
    """
    problem = get_problem("relaxation", mu=mu)
    grid = SpaceGrid(M)
    mass = mass_matrix(grid)
    lap = stiffness_matrix(grid, 0.0, CoefficientField(lambda x, t: 1.0 + 0.0 * x, 1.0, 1.0))
    s, w = gauss_points(3)
    out = []
    for N in n_list:
        mesh = graded_mesh(N, gamma, problem.T)
        sol = run(problem, mesh, grid)
        total = 0.0
        for n in range(1, N + 1):
            k = mesh.steps[n - 1]
            for sg, wg in zip(s, w):
                U = (1.0 - sg) * sol.U_plus[n - 1] + sg * sol.U_left[n]
                total += k * wg * (mass.quadratic_form(U) + lap.quadratic_form(U))
        out.append(total / (problem.T ** (1.0 - mu) * mass.quadratic_form(sol.U0)))
    return out


def check_stability(mu: float, slack: float = 0.01, **kw) -> Verdict:
    """Ratios must not grow by more than ``slack`` per doubling of ``N``."""
    r = stability_ratios(mu, **kw)
    growth = max(b / a - 1.0 for a, b in zip(r, r[1:]))
    detail = "ratios " + ", ".join(f"{x:.5f}" for x in r)
    return Verdict(f"stability mu={mu}", growth <= slack, growth, slack, detail)


CHECKS: dict[str, Callable[[], list[Verdict]]] = {
    "kernel": lambda: [check_kernel_oracle()],
    "projection": lambda: [check_projection()],
    "ritz": lambda: [check_ritz()],
    "probe": lambda: [check_probe(mu) for mu in ALPHAS],
    "identity": lambda: [check_identity()],
    "positivity": lambda: [check_positivity(a) for a in ALPHAS],
    "continuity": lambda: [check_continuity(a) for a in ALPHAS],
    "stability": lambda: [check_stability(mu) for mu in ALPHAS],
}


def verify_suite(names=None, progress: Callable | None = None) -> list[Verdict]:
    """Run the named checks (all by default) with fixed seeds."""
    names = list(CHECKS) if names is None else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; known: {sorted(CHECKS)}")
    out = []
    for name in names:
        start = time.perf_counter()
        verdicts = CHECKS[name]()
        out.extend(verdicts)
        if progress is not None:
            for v in verdicts:
                progress(v, time.perf_counter() - start)
    return out
