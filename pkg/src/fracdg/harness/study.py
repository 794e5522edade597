"""Convergence studies in the fine-grid maximum norm."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..dgstepper import DgSolution, run
from ..fem1d import SpaceGrid
from ..problems import ProblemSpec, get_problem
from ..timemesh import graded_mesh

__all__ = [
    "ConvergenceReport",
    "ReportRow",
    "StudyConfig",
    "fine_grid_error",
    "observed_rates",
    "space_study",
    "time_study",
]


@dataclass
class StudyConfig:
    """Parameters of a time or space convergence study.

    ``n_list`` drives time studies (with ``m_elements`` fixed) and
    ``m_list`` drives space studies (with ``n_steps`` and ``space_gamma``
    fixed). ``space_gamma = None`` means ``max(1, 2/sigma)``.
    """

    problem: str = "manufactured"
    mu: float = 0.5
    gamma: float = 1.0
    n_list: list[int] = field(default_factory=lambda: [10, 20, 40, 80, 160, 320])
    m_elements: int = 4096
    m_list: list[int] = field(default_factory=lambda: [10, 20, 40, 80, 160])
    n_steps: int = 2000
    space_gamma: float | None = None
    fine_m: int = 10
    limits: str = "left"
    initial: str = "ritz"
    output: str | None = None
    reference: str | None = None
    error_rel: float = 0.05
    rate_abs: float = 0.05

    def __post_init__(self):
        for name in ("n_list", "m_list"):
            vals = [int(v) for v in getattr(self, name)]
            setattr(self, name, vals)
            if any(b != 2 * a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must double at each entry, got {vals}")

    def build_problem(self) -> ProblemSpec:
        return get_problem(self.problem, mu=self.mu)


@dataclass
class ReportRow:
    key: int
    error: float
    rate: float | None = None
    ref_error: float | None = None
    ref_rate: float | None = None
    verdict: str = ""


@dataclass
class ConvergenceReport:
    """Errors and observed rates for one refinement sequence."""

    kind: str  # "N" or "M"
    mu: float
    gamma: float | None
    rows: list[ReportRow]

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.rows])

    @property
    def rates(self) -> list[float | None]:
        return [r.rate for r in self.rows]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "error", "rate", "ref_error", "ref_rate", "verdict"])
        for r in self.rows:
            writer.writerow(
                [
                    r.key,
                    f"{r.error:.4e}",
                    "" if r.rate is None else f"{r.rate:.4e}",
                    "" if r.ref_error is None else f"{r.ref_error:.4e}",
                    "" if r.ref_rate is None else f"{r.ref_rate:.4e}",
                    r.verdict,
                ]
            )
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def format(self) -> str:
        head = f"{self.kind:>6} {'error':>12} {'rate':>8}"
        lines = [head]
        for r in self.rows:
            rate = "" if r.rate is None else f"{r.rate:8.4f}"
            lines.append(f"{r.key:>6} {r.error:12.4e} {rate}")
        return "\n".join(lines)


def observed_rates(keys: Sequence[float], errors: Sequence[float]) -> list[float | None]:
    """``log(e_{i-1}/e_i) / log(key_i/key_{i-1})``; ``None`` for the first row."""
    rates: list[float | None] = [None]
    for (k0, e0), (k1, e1) in zip(zip(keys, errors), zip(keys[1:], errors[1:])):
        rates.append(math.log(e0 / e1) / math.log(k1 / k0))
    return rates


def fine_grid_error(sol: DgSolution, exact: Callable, m: int = 10, limits: str = "left") -> float:
    """``max_t ||U(t) - u(t)||`` over ``t_{j-1} + l k_j/m``.

    With ``limits="left"`` each node is evaluated once, as a left limit
    (``U0`` at ``t = 0``). With ``limits="both"`` every interval contributes
    its own endpoints, so right limits at the nodes are included as well.
    """
    if limits not in ("left", "both"):
        raise ValueError(f"limits must be 'left' or 'both', got {limits!r}")
    mesh, grid = sol.mesh, sol.grid
    x, wq, _ = grid.quadrature(5)
    worst = 0.0
    if limits == "left":
        U = grid.values_at(sol.U0, 5)
        worst = math.sqrt(((U - exact(x, 0.0)) ** 2 * wq).sum())
        lvals = np.arange(1, m + 1) / m
    else:
        lvals = np.arange(0, m + 1) / m
    for n in range(1, sol.solved + 1):
        t0, t1 = mesh.interval(n)
        ts = t0 + (t1 - t0) * lvals
        ts[-1] = t1
        a = grid.values_at(sol.U_plus[n - 1], 5)
        b = grid.values_at(sol.U_left[n], 5)
        U = (1.0 - lvals)[:, None, None] * a + lvals[:, None, None] * b
        err = (U - exact(x[None], ts[:, None, None])) ** 2 * wq
        worst = max(worst, math.sqrt(err.sum(axis=(1, 2)).max()))
    return worst


def _errors_report(kind, mu, gamma, keys, errors) -> ConvergenceReport:
    rates = observed_rates(keys, errors)
    rows = [ReportRow(int(k), float(e), r) for k, e, r in zip(keys, errors, rates)]
    return ConvergenceReport(kind, mu, gamma, rows)


def time_study(config: StudyConfig, progress: Callable | None = None) -> ConvergenceReport:
    """Refine ``N`` on a graded mesh with a fixed, fine spatial grid."""
    problem = config.build_problem()
    if problem.exact is None:
        raise ValueError(f"problem {config.problem!r} has no exact solution")
    grid = SpaceGrid(config.m_elements)
    errors = []
    for N in config.n_list:
        mesh = graded_mesh(N, config.gamma, problem.T)
        try:
            sol = run(problem, mesh, grid, initial=config.initial)
        except Exception as exc:
            raise RuntimeError(f"solver failed for N={N}, gamma={config.gamma}: {exc}") from exc
        errors.append(fine_grid_error(sol, problem.exact, config.fine_m, config.limits))
        if progress is not None:
            progress(N, errors[-1])
    return _errors_report("N", config.mu, config.gamma, config.n_list, errors)


def space_gamma(config: StudyConfig, problem: ProblemSpec) -> float:
    if config.space_gamma is not None:
        return float(config.space_gamma)
    sigma = problem.sigma if problem.sigma is not None else 1.0
    return max(1.0, 2.0 / sigma)


def space_study(config: StudyConfig, progress: Callable | None = None) -> ConvergenceReport:
    """Refine ``M`` with a fixed, strongly graded time mesh."""
    problem = config.build_problem()
    if problem.exact is None:
        raise ValueError(f"problem {config.problem!r} has no exact solution")
    gamma = space_gamma(config, problem)
    mesh = graded_mesh(config.n_steps, gamma, problem.T)
    errors = []
    for M in config.m_list:
        sol = run(problem, mesh, SpaceGrid(M), initial=config.initial)
        errors.append(fine_grid_error(sol, problem.exact, config.fine_m, config.limits))
        if progress is not None:
            progress(M, errors[-1])
    return _errors_report("M", config.mu, gamma, config.m_list, errors)
