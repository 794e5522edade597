"""Piecewise-linear DG time stepping for the fractional diffusion problem.

On each interval ``I_n = (t_{n-1}, t_n)`` the discrete solution is
``U(t) = a L0(t) + b L1(t)`` with ``L0 = (t_n - t)/k_n``, ``L1 = (t - t_{n-1})/k_n``,
``a = U^{n-1}_+`` and ``b = U^n``. Testing with ``L_p M`` gives a 2x2 block
system whose blocks are tridiagonal in space; the fractional history
enters the right-hand side through exact kernel moments of the stored
interval derivatives and jumps.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .fem1d import SpaceGrid, Tridiagonal, gauss_points, interpolate, load_vector, mass_matrix, ritz_project, stiffness_matrix
from .frackernel import _gauss_jacobi, kernel_increment_moment, kernel_moment
from .problems import ProblemSpec
from .timemesh import TimeMesh

__all__ = [
    "DgSolution",
    "SolverError",
    "StepSystem",
    "assemble_step",
    "evaluate",
    "forcing_rule",
    "initial_value",
    "run",
    "solve_step",
    "solve_step_dense",
]

#: Geometric panels (ratio 1/2, 8-point Gauss) used for the forcing on I_1,
#: closed by one Gauss-Jacobi panel at t = 0.
FIRST_INTERVAL_PANELS = 40
#: Backward error above which a step solve is reported as failed.
RESIDUAL_LIMIT = 1e-12


class SolverError(RuntimeError):
    """A step system could not be solved to the required accuracy."""


@dataclass
class DgSolution:
    """Discrete solution: ``U0`` plus the pair (right limit, left limit) per interval.

    ``U_plus[n-1]`` is ``U(t_{n-1}^+)`` and ``U_left[n]`` is ``U(t_n^-)``;
    ``U_left[0]`` holds the initial value ``U0``. Intervals not yet solved
    hold NaN.
    """

    mesh: TimeMesh
    grid: SpaceGrid
    U_left: np.ndarray
    U_plus: np.ndarray
    residuals: np.ndarray = field(repr=False)
    solved: int = 0

    @classmethod
    def start(cls, mesh: TimeMesh, grid: SpaceGrid, U0) -> "DgSolution":
        U0 = np.asarray(U0, dtype=float)
        if U0.shape != (grid.dof_count,):
            raise ValueError("U0 has the wrong number of dofs")
        U_left = np.full((mesh.N + 1, grid.dof_count), np.nan)
        U_left[0] = U0
        U_plus = np.full((mesh.N, grid.dof_count), np.nan)
        return cls(mesh, grid, U_left, U_plus, np.full(mesh.N, np.nan))

    @property
    def U0(self) -> np.ndarray:
        return self.U_left[0]

    def jumps(self) -> np.ndarray:
        """``[U]^j = U^j_+ - U^j`` for ``j = 0, ..., solved - 1``."""
        return self.U_plus[: self.solved] - self.U_left[: self.solved]

    def increments(self) -> np.ndarray:
        """``U^j - U^{j-1}_+`` (``k_j`` times the derivative) for solved intervals."""
        return self.U_left[1 : self.solved + 1] - self.U_plus[: self.solved]

    def evaluate(self, t: float, side: str = "left") -> np.ndarray:
        return evaluate(self, t, side)

    def to_csv(self, path=None) -> str:
        """Node values ``t, side, u_1, ..., u_{M-1}`` (left and right limits)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "limit"] + [f"u{i}" for i in range(1, self.grid.dof_count + 1)])
        nodes = self.mesh.nodes
        writer.writerow([repr(0.0), "initial"] + [f"{v:.16e}" for v in self.U0])
        for n in range(self.solved):
            writer.writerow([repr(float(nodes[n])), "right"] + [f"{v:.16e}" for v in self.U_plus[n]])
            writer.writerow([repr(float(nodes[n + 1])), "left"] + [f"{v:.16e}" for v in self.U_left[n + 1]])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


@dataclass
class StepSystem:
    """Block system ``sum_q blocks[p][q] @ x_q = rhs[p]`` for one interval."""

    n: int
    blocks: list[list[Tridiagonal]]
    rhs: np.ndarray

    def apply(self, a, b) -> np.ndarray:
        x = (a, b)
        return np.array([sum(self.blocks[p][q] @ x[q] for q in range(2)) for p in range(2)])

    def to_dense(self) -> np.ndarray:
        return np.block([[self.blocks[p][q].to_dense() for q in range(2)] for p in range(2)])


def forcing_rule(mesh: TimeMesh, n: int, singular_power: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Time quadrature nodes and weights for the forcing integral over ``I_n``.

    ``I_1`` gets composite 8-point Gauss on panels halving toward ``t = 0``;
    the innermost panel uses Gauss-Jacobi with weight ``t**singular_power``
    when the forcing is known to behave like that power near ``t = 0``.
    Later intervals are cut at ``t_{n-1} 2^i`` so every panel has
    ``t_right/t_left <= 2``, then 8-point Gauss per panel; on uniform
    meshes this is a single panel.
    """
    t0, t1 = mesh.interval(n)
    if n == 1:
        s, w = gauss_points(8)
        edges = t1 * 0.5 ** np.arange(FIRST_INTERVAL_PANELS - 1, -1, -1)
    else:
        s, w = gauss_points(8)
        cuts = t0 * 2.0 ** np.arange(1, 64)
        cuts = cuts[cuts < t1 * (1.0 - 1e-12)]
        edges = np.concatenate(([t0], cuts, [t1]))
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * s[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    if n == 1:
        d = edges[0]
        e = 0.0 if singular_power is None or singular_power >= 0.0 else singular_power
        xj, wj = _gauss_jacobi(4, e)
        jn = 0.5 * d * (xj + 1.0)
        # weights for int_0^d t^e g(t) dt, divided by t^e at the nodes
        jw = wj * (0.5 * d) ** (1.0 + e) / np.power(jn, e)
        nodes, weights = np.concatenate((jn, nodes)), np.concatenate((jw, weights))
    return nodes, weights


def initial_value(problem: ProblemSpec, grid: SpaceGrid, how: str = "ritz") -> np.ndarray:
    """Discrete initial value: Ritz projection (default), interpolant or L2 projection."""
    if how == "ritz":
        return ritz_project(grid, problem.u0, 0.0, problem.A, problem.du0)
    if how == "interpolant":
        return interpolate(grid, problem.u0)
    if how == "l2":
        return mass_matrix(grid).solve(load_vector(grid, problem.u0))
    raise ValueError(f"unknown initial value choice {how!r}")


def _basis_moments(interval, a, beta, width=None):
    """Moments of ``L0`` and ``L1`` against a (possibly differenced) kernel."""
    if width is None:
        j0 = kernel_moment(interval, a, beta, 0)
        j1 = kernel_moment(interval, a, beta, 1)
    else:
        j0 = kernel_increment_moment(interval, a, width, beta, 0)
        j1 = kernel_increment_moment(interval, a, width, beta, 1)
    return np.stack([j0 - j1, j1])


def assemble_step(n: int, problem: ProblemSpec, sol: DgSolution, mass: Tridiagonal | None = None) -> StepSystem:
    """Assemble the block system for interval ``n`` (1-based)."""
    mesh, grid = sol.mesh, sol.grid
    if not 1 <= n <= mesh.N:
        raise IndexError(f"interval {n} outside 1..{mesh.N}")
    if sol.solved != n - 1:
        raise SolverError(f"interval {n} requires intervals 1..{n - 1} solved, have {sol.solved}")
    mu = problem.mu
    mass = mass_matrix(grid) if mass is None else mass
    t0, t1 = mesh.interval(n)
    k = t1 - t0
    nodes = mesh.nodes
    steps = mesh.steps

    # local Caputo term and the jump at t_{n-1}
    jw2 = _basis_moments((t0, t1), t0, 2.0 - mu)
    jw1 = _basis_moments((t0, t1), t0, 1.0 - mu)

    # stiffness integrated with 3-point Gauss in time
    s, w = gauss_points(3)
    S = [[None, None], [None, None]]
    for sg, wg in zip(s, w):
        K = stiffness_matrix(grid, t0 + k * sg, problem.A)
        L = (1.0 - sg, sg)
        for p in range(2):
            for q in range(2):
                term = (k * wg * L[p] * L[q]) * K
                S[p][q] = term if S[p][q] is None else S[p][q] + term

    blocks = [
        [(jw1[p] - jw2[p] / k) * mass + S[p][0], (jw2[p] / k) * mass + S[p][1]]
        for p in range(2)
    ]

    tf, wf = forcing_rule(mesh, n, problem.singular_power)
    loads = problem.loads(grid, tf)
    lf = (tf - t0) / k
    F = np.stack([(wf * (1.0 - lf)) @ loads, (wf * lf) @ loads])

    rhs = F + np.outer(jw1, mass @ sol.U_left[n - 1])
    if n > 1:
        # history of U' on I_1..I_{n-1}: weights per unit increment of U
        D = _basis_moments((t0, t1), nodes[1:n], 2.0 - mu, width=steps[: n - 1]) / steps[: n - 1]
        # history jumps at t_0..t_{n-2}
        E = _basis_moments((t0, t1), nodes[: n - 1], 1.0 - mu)
        hist = D @ sol.increments() + E @ sol.jumps()[: n - 1]
        rhs = rhs - np.stack([mass @ hist[0], mass @ hist[1]])
    return StepSystem(n, blocks, rhs)


def _banded(system: StepSystem) -> np.ndarray:
    """Interleave unknowns ``(a_i, b_i)`` into a 7-band matrix for solve_banded."""
    ndof = system.blocks[0][0].n
    ab = np.zeros((7, 2 * ndof))
    i = np.arange(ndof)
    for p in range(2):
        for q in range(2):
            B = system.blocks[p][q]
            # (row, col) = (2i + p, 2i' + q); band index 3 + row - col
            ab[3 + p - q, 2 * i + q] = B.diag
            ab[3 + 2 + p - q, 2 * i[:-1] + q] = B.lower  # i' = i - 1
            ab[3 - 2 + p - q, 2 * i[1:] + q] = B.upper  # i' = i + 1
    return ab


def _row_abs_sums(system: StepSystem) -> np.ndarray:
    sums = []
    for p in range(2):
        acc = 0.0
        for B in system.blocks[p]:
            r = np.abs(B.diag).copy()
            r[1:] += np.abs(B.lower)
            r[:-1] += np.abs(B.upper)
            acc = acc + r
        sums.append(acc)
    return np.array(sums)


def _check_residual(system: StepSystem, a, b) -> float:
    """Normwise backward error ``|r| / (|A| |x| + |rhs|)`` in the max norm."""
    res = system.rhs - system.apply(a, b)
    if not np.all(np.isfinite(res)):
        raise SolverError(f"non-finite solution on interval {system.n}")
    xnorm = max(np.abs(a).max(), np.abs(b).max())
    scale = _row_abs_sums(system).max() * xnorm + np.abs(system.rhs).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(res).max() / scale)


def solve_step(system: StepSystem) -> tuple[np.ndarray, np.ndarray, float]:
    """Banded direct solve; returns ``(U^{n-1}_+, U^n, relative residual)``."""
    ndof = system.blocks[0][0].n
    z = np.empty(2 * ndof)
    z[0::2], z[1::2] = system.rhs[0], system.rhs[1]
    ab = _banded(system)
    try:
        x = solve_banded((3, 3), ab, z)
        # one step of iterative refinement
        r = system.rhs - system.apply(x[0::2], x[1::2])
        z[0::2], z[1::2] = r[0], r[1]
        x = x + solve_banded((3, 3), ab, z)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular step system on interval {system.n}") from exc
    a, b = x[0::2], x[1::2]
    rel = _check_residual(system, a, b)
    if rel > RESIDUAL_LIMIT:
        raise SolverError(f"step {system.n} residual {rel:.3e} exceeds {RESIDUAL_LIMIT:g}")
    return a, b, rel


def solve_step_dense(system: StepSystem) -> tuple[np.ndarray, np.ndarray, float]:
    """Dense reference solve, for cross-checking small systems."""
    ndof = system.blocks[0][0].n
    x = np.linalg.solve(system.to_dense(), system.rhs.ravel())
    a, b = x[:ndof], x[ndof:]
    return a, b, _check_residual(system, a, b)


def run(
    problem: ProblemSpec,
    mesh: TimeMesh,
    grid: SpaceGrid,
    initial: str = "ritz",
    U0=None,
    solver: Callable = solve_step,
) -> DgSolution:
    """Solve interval by interval; ``U0`` overrides the ``initial`` choice."""
    if abs(mesh.T - problem.T) > 1e-14 * problem.T:
        raise ValueError(f"mesh ends at {mesh.T} but the problem at {problem.T}")
    if U0 is None:
        U0 = initial_value(problem, grid, initial)
    sol = DgSolution.start(mesh, grid, U0)
    mass = mass_matrix(grid)
    for n in range(1, mesh.N + 1):
        system = assemble_step(n, problem, sol, mass)
        a, b, rel = solver(system)
        sol.U_plus[n - 1] = a
        sol.U_left[n] = b
        sol.residuals[n - 1] = rel
        sol.solved = n
    return sol


def _locate(mesh: TimeMesh, t: float, side: str) -> int:
    """Interval index ``n`` whose closure holds ``t`` (left or right limit at nodes)."""
    if side == "left":
        n = int(np.searchsorted(mesh.nodes, t, side="left"))
    elif side == "right":
        n = int(np.searchsorted(mesh.nodes, t, side="right"))
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return min(max(n, 1), mesh.N)


def evaluate(sol: DgSolution, t: float, side: str = "left") -> np.ndarray:
    """``U(t)``; at nodes the left limit by default, ``U0`` at ``t = 0``.

    ``side="right"`` returns right limits at interior nodes (and
    ``U^0_+`` at ``t = 0``).
    """
    mesh = sol.mesh
    t = float(t)
    if t < 0.0 or t > mesh.T:
        raise ValueError(f"t = {t} outside [0, {mesh.T}]")
    if t == 0.0 and side == "left":
        return sol.U0.copy()
    n = _locate(mesh, t, side)
    if n > sol.solved:
        raise SolverError(f"interval {n} has not been solved")
    t0, t1 = mesh.interval(n)
    l1 = (t - t0) / (t1 - t0)
    if l1 == 1.0:
        return sol.U_left[n].copy()
    if l1 == 0.0:
        return sol.U_plus[n - 1].copy()
    return (1.0 - l1) * sol.U_plus[n - 1] + l1 * sol.U_left[n]
