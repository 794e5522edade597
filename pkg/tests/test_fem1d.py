import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdg.fem1d import (
    CoefficientError,
    CoefficientField,
    SpaceGrid,
    Tridiagonal,
    gauss_points,
    h1_seminorm_error,
    h1_seminorm_weighted,
    interpolate,
    l2_error,
    l2_norm,
    l2_time_project,
    load_vector,
    load_vectors,
    mass_matrix,
    ritz_project,
    stiffness_matrix,
)
from fracdg.harness.study import observed_rates
from fracdg.harness.verify import check_projection, check_ritz

UNIT = CoefficientField(lambda x, t: 1.0 + 0.0 * x, 1.0, 1.0, x_independent=True)
GROWING_A = CoefficientField(lambda x, t: 1.0 + np.power(t, 1.5) + 0.0 * x, 1.0, 2.0)


def test_grid_basics():
    g = SpaceGrid(4)
    assert g.h == 0.25 and g.dof_count == 3
    np.testing.assert_allclose(g.interior, [0.25, 0.5, 0.75])
    with pytest.raises(ValueError):
        SpaceGrid(1)
    with pytest.raises(ValueError):
        g.expand(np.zeros(4))


def test_mass_matrix_entries():
    M = mass_matrix(SpaceGrid(4))
    np.testing.assert_allclose(M.diag, 2 * 0.25 / 3)
    np.testing.assert_allclose(M.lower, 0.25 / 6)
    # the interior hats sum to 1 on [h, 1-h] with linear ramps at both ends
    ones = np.ones(3)
    assert M.quadratic_form(ones) == pytest.approx((1.0 - 2 * 0.25) + 2 * 0.25 / 3, rel=1e-14)


def test_stiffness_entries_unit_and_growing():
    g = SpaceGrid(4)
    K = stiffness_matrix(g, 0.0, UNIT)
    np.testing.assert_allclose(K.diag, 8.0)
    np.testing.assert_allclose(K.upper, -4.0)
    K1 = stiffness_matrix(g, 1.0, GROWING_A)
    np.testing.assert_allclose(K1.to_dense(), 2.0 * K.to_dense(), rtol=1e-14)


def test_tridiagonal_ops():
    rng = np.random.default_rng(0)
    T = Tridiagonal(rng.normal(size=4), 4.0 + rng.random(5), rng.normal(size=4))
    v = rng.normal(size=5)
    np.testing.assert_allclose(T @ v, T.to_dense() @ v, rtol=1e-14)
    np.testing.assert_allclose(T.solve(T @ v), v, rtol=1e-12)
    np.testing.assert_allclose((2.0 * T + T).to_dense(), 3.0 * T.to_dense())
    with pytest.raises(ValueError):
        Tridiagonal(np.zeros(2), np.zeros(4), np.zeros(3))


def test_coefficient_bounds_enforced():
    bad = CoefficientField(lambda x, t: 1.0 + t + 0.0 * x, 1.0, 1.5)
    bad(np.array([0.2]), 0.4)
    with pytest.raises(CoefficientError):
        bad(np.array([0.2]), 0.9)
    with pytest.raises(ValueError):
        CoefficientField(lambda x, t: x, 0.0, 1.0)


def test_load_vectors_match_single_loads():
    g = SpaceGrid(8)
    f = lambda x, t: np.sin(np.pi * x) * (1.0 + t)
    many = load_vectors(g, f, [0.0, 0.5])
    np.testing.assert_allclose(many[1], load_vector(g, lambda x: f(x, 0.5)), rtol=1e-14)


def test_load_of_sine_is_proportional_to_nodal_sine():
    g = SpaceGrid(16)
    b = load_vector(g, lambda x: np.sin(np.pi * x))
    s = np.sin(np.pi * g.interior)
    ratio = b / s
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-9)


def test_ritz_fixes_discrete_space():
    v = check_ritz(20, seed=2, limit=1e-12)
    assert v.passed, v.format()


def test_ritz_without_derivative_uses_differences():
    g = SpaceGrid(32)
    u = lambda x: np.sin(np.pi * x)
    exact = ritz_project(g, u, 0.3, GROWING_A, lambda x: np.pi * np.cos(np.pi * x))
    approx = ritz_project(g, u, 0.3, GROWING_A)
    np.testing.assert_allclose(approx, exact, atol=1e-9)


def test_ritz_rates():
    A = CoefficientField(lambda x, t: 1.0 + 0.5 * x + 0.3 * np.sin(2.0 * x) * t, 0.5, 2.0)
    u = lambda x: np.sin(np.pi * x) * np.exp(x)
    du = lambda x: (np.pi * np.cos(np.pi * x) + np.sin(np.pi * x)) * np.exp(x)
    Ms = [8, 16, 32, 64, 128, 256]
    l2, h1 = [], []
    for M in Ms:
        g = SpaceGrid(M)
        w = ritz_project(g, u, 0.7, A, du)
        l2.append(l2_error(g, w, u))
        h1.append(h1_seminorm_error(g, w, du))
    r_l2 = observed_rates(Ms, l2)[1:]
    r_h1 = observed_rates(Ms, h1)[1:]
    assert all(abs(r - 2.0) <= 0.05 for r in r_l2[1:]), r_l2
    assert all(abs(r - 1.0) <= 0.05 for r in r_h1[1:]), r_h1


def test_norms():
    g = SpaceGrid(64)
    w = interpolate(g, lambda x: np.sin(np.pi * x))
    assert l2_norm(g, w) == pytest.approx(math.sqrt(0.5), rel=1e-3)
    assert h1_seminorm_weighted(g, w, 0.0, UNIT) == pytest.approx(math.pi / math.sqrt(2), rel=1e-3)
    assert l2_error(g, w, lambda x: np.sin(np.pi * x)) < 1e-3


def test_time_projection_exact_on_linears():
    v = check_projection(50, seed=1, limit=1e-13)
    assert v.passed, v.format()


def test_time_projection_of_t_squared():
    proj = l2_time_project(lambda t: t * t, (0.0, 1.0))
    for t in (0.0, 0.3, 1.0):
        assert proj(t) == pytest.approx(t - 1.0 / 6.0, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(0.0, 1.0),
    k=st.floats(1e-3, 1.0),
    c=st.lists(st.floats(-5.0, 5.0), min_size=4, max_size=4),
)
def test_time_projection_sup_bound(a, k, c):
    # ||Pi v||_inf <= 4/k int |v|  on the interval, with a smooth cubic v
    v = lambda t: c[0] + c[1] * (t - a) / k + c[2] * ((t - a) / k) ** 2 + c[3] * ((t - a) / k) ** 3
    proj = l2_time_project(v, (a, a + k))
    ts = np.linspace(a, a + k, 201)
    sup = max(abs(proj(t)) for t in ts)
    s, w = gauss_points(20)
    l1 = k * float(np.sum(w * np.abs(v(a + k * s))))
    assert sup <= 4.0 / k * l1 * (1.0 + 1e-9) + 1e-12


def test_ritz_orthogonality_residual():
    # a(t, R_h v - v, phi_i) with exact element integrals; limited by the 3-point rule
    from scipy import integrate

    A = CoefficientField(lambda x, t: 1.0 + 0.5 * x + 0.3 * np.sin(2.0 * x) * t, 0.5, 2.0)
    du = lambda x: (np.pi * np.cos(np.pi * x) + np.sin(np.pi * x)) * np.exp(x)
    g = SpaceGrid(64)
    t = 0.7
    w = g.expand(ritz_project(g, lambda x: np.sin(np.pi * x) * np.exp(x), t, A, du))
    slopes = np.diff(w) / g.h
    per_el = np.array(
        [
            integrate.quad(lambda x: A(x, t) * (slopes[e] - du(x)), g.nodes[e], g.nodes[e + 1], epsabs=1e-15)[0]
            for e in range(g.M)
        ]
    ) / g.h
    res = per_el[:-1] - per_el[1:]
    assert np.abs(res).max() <= 1e-10
