"""Numerical checks of the fractional-operator identities and inequalities.

Everything here works on scalar piecewise-linear functions of time. The
Riemann-Liouville derivative of such a function is a finite sum of causal
powers ``c * omega_beta(t - tau)``, which lets both the identity
``v = I^mu(D^mu v)`` and the operator inequalities be checked against
independent evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from ..frackernel import omega, quadrature_oracle

__all__ = [
    "CausalSum",
    "ScalarDG",
    "continuity_case",
    "identity_case",
    "positivity_case",
    "positivity_constant",
    "random_dg",
]


@dataclass(frozen=True)
class CausalSum:
    """``g(t) = sum_m coef[m] * omega_{beta[m]}(t - tau[m])`` for ``t > tau[m]``."""

    coef: np.ndarray
    beta: np.ndarray
    tau: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for c, b, tau in zip(self.coef, self.beta, self.tau):
            d = t - tau
            on = d > 0.0
            out[on] += c * omega(b, d[on])
        return out

    def offset(self, a: float, r):
        """``g(a + r)`` with distances formed as ``(a - tau) + r``.

        Accurate for tiny ``r`` where ``a + r`` would round to ``a``.
        """
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for c, b, tau in zip(self.coef, self.beta, self.tau):
            d = (a - tau) + r
            on = d > 0.0
            out[on] += c * omega(b, d[on])
        return out

    def integrate(self, alpha: float) -> "CausalSum":
        """Fractional integral ``I^alpha``: each ``omega_beta`` becomes ``omega_{beta+alpha}``."""
        return CausalSum(self.coef, self.beta + alpha, self.tau)


@dataclass(frozen=True)
class ScalarDG:
    """Scalar piecewise-linear function, possibly discontinuous at the nodes.

    ``right[j]`` is ``v(t_j^+)`` for ``j = 0..N-1`` and ``left[j]`` is
    ``v(t_j^-)`` for ``j = 1..N`` (``left[0]`` is unused).
    """

    nodes: np.ndarray
    right: np.ndarray
    left: np.ndarray

    @property
    def N(self) -> int:
        return len(self.nodes) - 1

    def slopes(self) -> np.ndarray:
        return (self.left[1:] - self.right) / np.diff(self.nodes)

    def jumps(self) -> np.ndarray:
        """``[v]^j`` for ``j = 1..N-1``."""
        return self.right[1:] - self.left[1:-1]

    def interval_of(self, t: float) -> int:
        """1-based index ``n`` with ``t`` in ``(t_{n-1}, t_n]``."""
        n = int(np.searchsorted(self.nodes, t, side="left"))
        return min(max(n, 1), self.N)

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = np.clip(np.searchsorted(self.nodes, t, side="left"), 1, self.N)
        lam = (t - self.nodes[n - 1]) / (self.nodes[n] - self.nodes[n - 1])
        return (1.0 - lam) * self.right[n - 1] + lam * self.left[n]

    def on_interval(self, n: int, r):
        """``v(t_{n-1} + r)`` on interval ``n`` (1-based)."""
        return self.right[n - 1] + self.slopes()[n - 1] * np.asarray(r, dtype=float)

    def rl_derivative(self, mu: float) -> CausalSum:
        """``^R D^mu v`` from the jump expansion.

        On ``I_j``: ``omega_{1-mu}(t) v^0_+ + sum_{i<j} omega_{1-mu}(t - t_i) [v]^i
        + sum_i slope_i (omega_{2-mu}(t - t_{i-1}) - omega_{2-mu}(t - t_i))``,
        the last term truncated at ``t`` for ``i = j``.
        """
        t, s = self.nodes, self.slopes()
        coef = [self.right[0], *self.jumps(), *s, *(-s[:-1])]
        beta = [1.0 - mu] * self.N + [2.0 - mu] * (2 * self.N - 1)
        tau = [*t[:-1], *t[:-1], *t[1:-1]]
        return CausalSum(np.array(coef, float), np.array(beta, float), np.array(tau, float))


def random_dg(rng: np.random.Generator, N: int | None = None, T: float = 1.0, continuous: bool = False) -> ScalarDG:
    """Random mesh on ``[0, T]`` with at most 8 intervals and random values."""
    if N is None:
        N = int(rng.integers(1, 9))
    inner = np.sort(rng.uniform(0.0, T, N - 1))
    nodes = np.concatenate([[0.0], inner, [T]])
    # keep intervals from collapsing
    nodes = 0.7 * nodes + 0.3 * np.linspace(0.0, T, N + 1)
    right = rng.normal(size=N)
    left = np.empty(N + 1)
    left[0] = 0.0
    if continuous:
        vals = np.concatenate([right, rng.normal(size=1)])
        right = vals[:-1]
        left[1:] = vals[1:]
    else:
        left[1:] = rng.normal(size=N)
    return ScalarDG(nodes, right, left)


def fractional_integral_piecewise(g: CausalSum, nodes: np.ndarray, mu: float, t: float) -> float:
    """``I^mu g(t)`` integrated interval by interval in closed form.

    ``int_a^b omega_mu(t - s) omega_beta(s - tau) ds`` equals
    ``omega_{mu+beta}(t - tau) [B_z(beta, mu)]_{z_a}^{z_b}`` with the
    regularized incomplete beta function and ``z = (s - tau)/(t - tau)``.
    """
    total = 0.0
    edges = [x for x in nodes if x < t] + [t]
    for a, b in zip(edges[:-1], edges[1:]):
        for c, beta, tau in zip(g.coef, g.beta, g.tau):
            if tau > a:  # term switched off on this piece
                continue
            scale = omega(mu + beta, t - tau)
            zb = (b - tau) / (t - tau)
            za = (a - tau) / (t - tau)
            total += c * scale * (betainc(beta, mu, min(zb, 1.0)) - betainc(beta, mu, za))
    return float(total)


def fractional_integral_oracle(g: CausalSum, nodes: np.ndarray, mu: float, t: float, tol: float = 1e-12) -> float:
    """``I^mu g(t)`` by the graded quadrature oracle, split at each piece's midpoint."""
    total = 0.0
    edges = [x for x in nodes if x < t] + [t]
    min_beta = float(np.min(g.beta))
    for a, b in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + b)
        total += quadrature_oracle(
            lambda r: omega(mu, (t - a) - r) * g.offset(a, r),
            (a, mid), "left", min(min_beta - 1.0, 0.0), tol=tol, local=True,
        )
        if b == t:
            total += quadrature_oracle(
                lambda r: omega(mu, r) * g.offset(t, -r),
                (mid, t), "right", mu - 1.0, tol=tol, local=True,
            )
        else:
            # graded toward b: t may sit just beyond b, where the kernel is nearly singular
            total += quadrature_oracle(
                lambda r, b=b: omega(mu, (t - b) + r) * g.offset(b, -r),
                (mid, b), "right", 0.0, tol=tol, local=True,
            )
    return total


def identity_case(v: ScalarDG, mu: float, points) -> float:
    """Max ``|I^mu(^R D^mu v)(t) - v(t)|`` over ``points``."""
    g = v.rl_derivative(mu)
    worst = 0.0
    for t in np.atleast_1d(points):
        worst = max(worst, abs(fractional_integral_piecewise(g, v.nodes, mu, float(t)) - float(v(t)[0])))
    return worst


def positivity_constant(alpha: float) -> float:
    """``(pi alpha)^alpha / (1 + alpha)^(1 + alpha) * cos(alpha pi / 2)``."""
    return (math.pi * alpha) ** alpha / (1.0 + alpha) ** (1.0 + alpha) * math.cos(alpha * math.pi / 2.0)


def _integrate_pieces(func, nodes, exponents, tol):
    """Sum over mesh intervals of oracle integrals graded toward each left end.

    ``func(n, a, r)`` evaluates the integrand at ``t = a + r`` on interval ``n``.
    """
    total = 0.0
    for n, (a, b) in enumerate(zip(nodes[:-1], nodes[1:]), start=1):
        total += quadrature_oracle(
            lambda r: func(n, a, r), (a, b), "left", exponents[n - 1], tol=tol, atol=1e-300, local=True
        )
    return total


def positivity_case(v: ScalarDG, alpha: float, tol: float = 1e-10) -> tuple[float, float]:
    """Return ``(lhs, rhs)`` of ``int (D^alpha v) v >= c t_n^-alpha int v^2``."""
    g = v.rl_derivative(alpha)
    exps = [-alpha] + [1.0 - alpha] * (v.N - 1)
    lhs = _integrate_pieces(lambda n, a, r: g.offset(a, r) * v.on_interval(n, r), v.nodes, exps, tol)
    norm2 = _integrate_pieces(lambda n, a, r: v.on_interval(n, r) ** 2, v.nodes, [0.0] * v.N, tol)
    tn = float(v.nodes[-1])
    return lhs, positivity_constant(alpha) * tn ** (-alpha) * norm2


def _integral_of_continuous(v: ScalarDG, alpha: float) -> CausalSum:
    """``I^alpha v`` for continuous piecewise-linear ``v``.

    ``v = v(0) omega_1 + sum_i (slope_i - slope_{i-1}) omega_2(t - t_{i-1})``.
    """
    s = v.slopes()
    ds = np.diff(np.concatenate([[0.0], s]))
    coef = np.concatenate([[v.right[0]], ds])
    beta = np.concatenate([[1.0], np.full(v.N, 2.0)])
    tau = np.concatenate([[0.0], v.nodes[:-1]])
    return CausalSum(coef, beta, tau).integrate(alpha)


def continuity_case(v: ScalarDG, w: ScalarDG, alpha: float, tol: float = 1e-10) -> tuple[float, float]:
    """Return ``(lhs, rhs)`` of ``|int I^a v w|^2 <= sec^2(a pi/2) int I^a v v int I^a w w``.

    ``v`` and ``w`` must be continuous and share their mesh.
    """
    if not np.array_equal(v.nodes, w.nodes):
        raise ValueError("v and w must share a mesh")
    Iv, Iw = _integral_of_continuous(v, alpha), _integral_of_continuous(w, alpha)
    exps = [alpha] + [1.0 + alpha] * (v.N - 1)
    vw = _integrate_pieces(lambda n, a, r: Iv.offset(a, r) * w.on_interval(n, r), v.nodes, exps, tol)
    vv = _integrate_pieces(lambda n, a, r: Iv.offset(a, r) * v.on_interval(n, r), v.nodes, exps, tol)
    ww = _integrate_pieces(lambda n, a, r: Iw.offset(a, r) * w.on_interval(n, r), w.nodes, exps, tol)
    return vw**2, vv * ww / math.cos(alpha * math.pi / 2.0) ** 2
