"""Power-law kernels and their exact time moments.

The fractional kernel is

.. math::

    \\omega_\\beta(x) = \\frac{x^{\\beta - 1}}{\\Gamma(\\beta)},

so that :math:`I^\\beta v = \\omega_\\beta * v` is the Riemann-Liouville
integral and :math:`\\omega_\\alpha * \\omega_\\beta = \\omega_{\\alpha+\\beta}`.
Moments of the kernel against the local time monomials
:math:`((t - t_l)/k)^q` are what the DG stepper needs; they are evaluated
in closed form (integration by parts) near the kernel singularity and by
a high-order Gauss rule when the singularity is well separated from the
interval, where the closed form would lose digits to cancellation.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureError",
    "caputo_power",
    "check_order",
    "kernel_increment_moment",
    "kernel_moment",
    "omega",
    "omega_increment",
    "quadrature_oracle",
]

#: Number of Gauss-Legendre points used for well-separated moments.
FAR_FIELD_POINTS = 20


class QuadratureError(RuntimeError):
    """Raised when the quadrature oracle fails to reach its tolerance."""


def check_order(mu: float) -> float:
    """Validate a fractional order ``0 < mu < 1``."""
    mu = float(mu)
    if not 0.0 < mu < 1.0:
        raise ValueError(f"fractional order must satisfy 0 < mu < 1, got {mu}")
    return mu


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta > 0.0:
        raise ValueError(f"kernel index must be positive, got {beta}")
    return beta


def omega(beta: float, x):
    """Evaluate :math:`\\omega_\\beta(x) = x^{\\beta-1}/\\Gamma(\\beta)`.

    Accepts scalars or arrays. ``x = 0`` is allowed when ``beta >= 1``
    (value 0, or 1 when ``beta == 1``).
    """
    beta = _check_beta(beta)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise ValueError("omega is only defined for x >= 0")
    if beta < 1.0 and np.any(xa == 0.0):
        raise ValueError(f"omega_{beta} is singular at x = 0")
    g = math.gamma(beta)
    if beta == 1.0:
        out = np.ones_like(xa)
    else:
        out = np.power(xa, beta - 1.0) / g
    if np.ndim(x) == 0:
        return float(out)
    return out


def omega_increment(beta: float, y, width):
    """Return ``omega(beta, y + width) - omega(beta, y)`` without cancellation.

    For ``y > 0`` the difference is written as
    ``omega(beta, y) * expm1((beta - 1) * log1p(width / y))``, which keeps
    full relative accuracy even when ``width`` is many orders of magnitude
    smaller than ``y``.
    """
    beta = _check_beta(beta)
    y = np.asarray(y, dtype=float)
    width = np.broadcast_to(np.asarray(width, dtype=float), y.shape)
    out = np.empty(np.broadcast_shapes(y.shape, width.shape))
    pos = y > 0.0
    if np.any(pos):
        yp = y[pos]
        out[pos] = (np.power(yp, beta - 1.0) / math.gamma(beta)) * np.expm1(
            (beta - 1.0) * np.log1p(width[pos] / yp)
        )
    if np.any(~pos):
        out[~pos] = omega(beta, width[~pos]) - omega(beta, y[~pos])
    if out.ndim == 0:
        return float(out)
    return out


@lru_cache(maxsize=None)
def _gauss_unit(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def _moments(x, k: float, beta: float, q: int, width=None) -> np.ndarray:
    """Vectorised kernel moments over offsets ``x = t_left - a >= 0``.

    Computes ``int_0^k (tau/k)^q K(x + tau) dtau`` where ``K = omega_beta``
    or, when ``width`` is given, ``K(y) = omega_beta(y + width) - omega_beta(y)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if width is not None:
        width = np.broadcast_to(np.asarray(width, dtype=float), x.shape)

    def antider(m, y, sel):
        # m-fold antiderivative of the kernel, vanishing at y = 0
        if width is None:
            return omega(beta + m, y)
        return omega_increment(beta + m, y, width[sel])

    out = np.empty_like(x)
    far = x >= k
    if np.any(far):
        s, w = _gauss_unit(FAR_FIELD_POINTS)
        y = x[far, None] + k * s[None, :]
        if width is None:
            kern = np.power(y, beta - 1.0) / math.gamma(beta)
        else:
            kern = omega_increment(beta, y, width[far, None])
        out[far] = k * (kern * (w * s**q)[None, :]).sum(axis=1)

    near = ~far
    if np.any(near):
        xn = x[near]
        end = xn + k

        def diff(m):
            return antider(m, end, near) - antider(m, xn, near)

        if q == 0:
            p = diff(1)
        elif q == 1:
            p = k * antider(1, end, near) - diff(2)
        else:
            p = k * k * antider(1, end, near) - 2.0 * (k * antider(2, end, near) - diff(3))
        out[near] = p / k**q
    return out


def _check_moment_args(interval, a, q):
    t_left, t_right = map(float, interval)
    if not t_right > t_left:
        raise ValueError(f"empty interval ({t_left}, {t_right})")
    if q not in (0, 1, 2):
        raise ValueError(f"moment order q must be 0, 1 or 2, got {q}")
    a = np.asarray(a, dtype=float)
    if np.any(a > t_left):
        raise ValueError("kernel origin a must not exceed the interval start")
    return t_left, t_right, a


def kernel_moment(interval, a, beta: float, q: int):
    """Moment ``int_{t_l}^{t_r} ((t - t_l)/k)^q omega_beta(t - a) dt``.

    ``a`` may be an array of kernel origins (all ``<= t_l``); the result
    then has the same shape.
    """
    beta = _check_beta(beta)
    t_left, t_right, a = _check_moment_args(interval, a, q)
    res = _moments(t_left - a, t_right - t_left, beta, q)
    return float(res[0]) if a.ndim == 0 else res.reshape(a.shape)


def kernel_increment_moment(interval, a, width, beta: float, q: int):
    """Moment of the kernel difference ``omega_beta(t-a+width) - omega_beta(t-a)``.

    With ``beta = 2 - mu`` this is the moment of
    ``int_{a-width}^{a} omega_{1-mu}(t - s) ds``, the history weight of a
    piecewise-constant derivative on ``(a - width, a)``.
    """
    beta = _check_beta(beta)
    t_left, t_right, a = _check_moment_args(interval, a, q)
    if np.any(np.asarray(width) <= 0.0):
        raise ValueError("width must be positive")
    res = _moments(t_left - a, t_right - t_left, beta, q, width=width)
    return float(res[0]) if a.ndim == 0 else res.reshape(a.shape)


def caputo_power(mu: float, sigma: float, t):
    """Caputo derivative of order ``mu`` of ``s -> s**sigma`` at ``t``."""
    mu = check_order(mu)
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0.0):
        raise ValueError("caputo_power requires t > 0")
    c = math.gamma(sigma + 1.0) / math.gamma(sigma + 1.0 - mu)
    out = c * np.power(ta, sigma - mu)
    return float(out) if np.ndim(t) == 0 else out


def _graded_rule(length: float, panels: int, split: int, exponent: float, npts: int = 4):
    """Composite Gauss rule on [0, length] graded geometrically toward 0.

    The innermost panel uses Gauss-Jacobi with weight ``s**exponent`` so the
    declared endpoint singularity is integrated exactly there.
    """
    s, w = _gauss_unit(npts)
    edges = length * 0.5 ** np.arange(panels - 1, -1, -1)
    edges = np.concatenate(([edges[0] * 0.0], edges)) if panels == 1 else edges
    sub = np.linspace(0.0, 1.0, split + 1)
    width = np.diff(edges)
    lo = (edges[:-1, None] + width[:, None] * sub[None, :-1]).ravel()
    h = np.repeat(width / split, split)
    nodes = (lo[:, None] + h[:, None] * s[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    if panels == 1:
        return nodes, weights
    # innermost panel [0, edges[0]]: int_0^d s^e g(s) ds, g assumed smooth
    d = edges[0]
    xj, wj = _gauss_jacobi(npts + 4, exponent)
    jn = d * 0.5 * (xj + 1.0)
    jw = wj * (0.5 * d) ** (1.0 + exponent)
    # fold the weight back so the caller's integrand can be used unchanged
    jw = jw / np.power(jn, exponent)
    return np.concatenate((jn, nodes)), np.concatenate((jw, weights))


@lru_cache(maxsize=None)
def _gauss_jacobi(npts: int, exponent: float):
    from scipy.special import roots_jacobi

    # weight (1 - x)^0 (1 + x)^exponent on [-1, 1]
    return roots_jacobi(npts, 0.0, exponent)


def quadrature_oracle(
    integrand: Callable,
    interval,
    singular: str | None = None,
    exponent: float = 0.0,
    tol: float = 1e-12,
    atol: float = 0.0,
    max_level: int = 8,
    local: bool = False,
) -> float:
    """Reference quadrature for integrands with one endpoint singularity.

    Parameters
    ----------
    integrand : callable
        Vectorised function of ``t``.
    interval : (float, float)
    singular : {"left", "right", None}
        Endpoint carrying the singularity ``|t - endpoint|**exponent``.
    exponent : float
        Declared singularity exponent, must exceed -1. Used to choose the
        grading depth so the innermost panel is below ``tol``.
    tol, atol : float
        Successive refinements must agree to ``max(tol * |Q|, atol)``.
    local : bool
        If true the integrand receives the distance from the singular
        endpoint (from the left endpoint when ``singular`` is None) instead
        of ``t``. Needed when the endpoint is far from the origin, since
        ``a + s`` rounds to ``a`` for the deepest panels.

    Composite 4-point Gauss on panels with ratio 1/2 toward the singular
    endpoint; each refinement level adds panels and halves every panel.
    """
    a, b = map(float, interval)
    if not b > a:
        raise ValueError(f"empty interval ({a}, {b})")
    if singular not in (None, "left", "right"):
        raise ValueError(f"singular must be 'left', 'right' or None, got {singular!r}")
    if not exponent > -1.0:
        raise ValueError("singularity exponent must exceed -1")
    length = b - a
    if singular is None:
        depth = 1
    else:
        depth = math.ceil((math.log2(1.0 / tol) + 6.0) / (1.0 + min(exponent, 0.0)))
        depth = min(max(depth, 16), 160)

    def evaluate(level: int) -> float:
        panels = depth + 4 * level if singular is not None else 1
        split = 2**level
        s, w = _graded_rule(length, panels, split, exponent)
        if local:
            t = s
        else:
            t = a + s if singular != "right" else b - s
        vals = np.asarray(integrand(t), dtype=float)
        return float(np.dot(w, vals))

    prev = evaluate(0)
    for level in range(1, max_level + 1):
        cur = evaluate(level)
        change = abs(cur - prev)
        if change <= max(tol * abs(cur), atol):
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not converge to {tol:g} on ({a}, {b}); "
        f"last two levels differ by {change:.3e}"
    )
