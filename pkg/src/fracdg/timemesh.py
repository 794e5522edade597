"""Graded time meshes ``t_n = (n/N)**gamma * T`` and the fine evaluation grid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["TimeMesh", "graded_mesh", "fine_grid", "mesh_property_margin"]


@dataclass(frozen=True)
class TimeMesh:
    """Partition ``0 = t_0 < t_1 < ... < t_N = T`` of ``[0, T]``."""

    T: float
    N: int
    gamma: float
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.shape != (self.N + 1,):
            raise ValueError(f"expected {self.N + 1} nodes, got {nodes.shape}")
        if nodes[0] != 0.0 or nodes[-1] != self.T:
            raise ValueError("mesh must start at 0 and end at T")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def steps(self) -> np.ndarray:
        """Step sizes ``k_1, ..., k_N``."""
        return np.diff(self.nodes)

    @property
    def k(self) -> float:
        """Maximum step size."""
        return float(self.steps.max())

    def interval(self, n: int) -> tuple[float, float]:
        """Endpoints of ``I_n = (t_{n-1}, t_n)``, 1-based."""
        if not 1 <= n <= self.N:
            raise IndexError(f"interval index {n} outside 1..{self.N}")
        return float(self.nodes[n - 1]), float(self.nodes[n])


def graded_mesh(N: int, gamma: float, T: float = 1.0) -> TimeMesh:
    """Mesh graded toward ``t = 0`` with exponent ``gamma >= 1``."""
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    if not gamma >= 1.0:
        raise ValueError(f"grading exponent must be >= 1, got {gamma}")
    if not T > 0.0:
        raise ValueError(f"final time must be positive, got {T}")
    N = int(N)
    nodes = (np.arange(N + 1) / N) ** gamma * T
    nodes[-1] = T
    return TimeMesh(T=float(T), N=N, gamma=float(gamma), nodes=nodes)


def mesh_property_margin(mesh: TimeMesh) -> np.ndarray:
    """Ratios ``k_j / (gamma k (t_j/T)^(1 - 1/gamma))``; all must be <= 1.

    Times are scaled by ``T`` so the bound holds for any final time; for
    ``T = 1`` this is ``k_j <= gamma k t_j^(1 - 1/gamma)``.
    """
    t = mesh.nodes[1:] / mesh.T
    bound = mesh.gamma * mesh.k * t ** (1.0 - 1.0 / mesh.gamma)
    return mesh.steps / bound


def fine_grid(mesh: TimeMesh, m: int = 10) -> np.ndarray:
    """Points ``t_{j-1} + l k_j / m`` for all intervals, sorted and deduplicated."""
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    m = int(m)
    frac = np.arange(m) / m
    pts = mesh.nodes[:-1, None] + mesh.steps[:, None] * frac[None, :]
    return np.append(pts.ravel(), mesh.T)
