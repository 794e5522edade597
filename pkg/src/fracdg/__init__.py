"""Piecewise-linear DG time stepping with P1 finite elements for
time-fractional diffusion ``D^mu u - (A u_x)_x = f`` on (0, 1)."""

from .dgstepper import DgSolution, SolverError, evaluate, run
from .fem1d import CoefficientField, SpaceGrid
from .frackernel import kernel_moment, omega, quadrature_oracle
from .problems import ProblemSpec, get_problem
from .timemesh import TimeMesh, fine_grid, graded_mesh

__all__ = [
    "CoefficientField",
    "DgSolution",
    "ProblemSpec",
    "SolverError",
    "SpaceGrid",
    "TimeMesh",
    "evaluate",
    "fine_grid",
    "get_problem",
    "graded_mesh",
    "kernel_moment",
    "omega",
    "quadrature_oracle",
    "run",
]
