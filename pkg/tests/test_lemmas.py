import math

import numpy as np
import pytest

from fracdg.frackernel import omega
from fracdg.harness.lemmas import (
    CausalSum,
    ScalarDG,
    continuity_case,
    fractional_integral_oracle,
    fractional_integral_piecewise,
    identity_case,
    positivity_case,
    positivity_constant,
    random_dg,
)
from fracdg.harness.verify import (
    check_continuity,
    check_identity,
    check_positivity,
    check_stability,
    stability_ratios,
    verify_suite,
)

ALPHAS = [0.3, 0.5, 0.7]


def _single(v0, v1, T=1.0):
    return ScalarDG(np.array([0.0, T]), np.array([v0]), np.array([0.0, v1]))


def test_rl_derivative_of_constant_and_ramp():
    mu, t = 0.4, np.array([0.2, 0.9])
    const = _single(2.0, 2.0).rl_derivative(mu)
    np.testing.assert_allclose(const(t), 2.0 * omega(1.0 - mu, t), rtol=1e-14)
    ramp = _single(0.0, 1.0).rl_derivative(mu)
    np.testing.assert_allclose(ramp(t), omega(2.0 - mu, t), rtol=1e-14)


def test_rl_derivative_sees_jumps():
    v = ScalarDG(np.array([0.0, 0.5, 1.0]), np.array([1.0, 3.0]), np.array([0.0, 1.0, 3.0]))
    g = v.rl_derivative(0.5)
    # constant 1 then constant 3: a unit start plus a jump of 2 at t = 0.5
    t = 0.8
    assert g(np.array([t]))[0] == pytest.approx(omega(0.5, t) + 2.0 * omega(0.5, t - 0.5), rel=1e-14)


def test_offset_matches_direct_evaluation():
    g = CausalSum(np.array([1.0, -2.0]), np.array([0.5, 1.5]), np.array([0.0, 0.3]))
    r = np.array([0.01, 0.2])
    np.testing.assert_allclose(g.offset(0.4, r), g(0.4 + r), rtol=1e-14)
    assert g.integrate(0.5).beta.tolist() == [1.0, 2.0]


def test_fractional_integral_closed_form_against_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        v = random_dg(rng)
        mu = rng.uniform(0.1, 0.9)
        g = v.rl_derivative(mu)
        t = rng.uniform(0.05, 1.0)
        a = fractional_integral_piecewise(g, v.nodes, mu, t)
        b = fractional_integral_oracle(g, v.nodes, mu, t)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-11)


def test_fractional_integral_just_past_a_node():
    rng = np.random.default_rng(5)
    v = random_dg(rng, N=4)
    g = v.rl_derivative(0.6)
    for t in (v.nodes[2] + 1e-9, v.nodes[2]):
        a = fractional_integral_piecewise(g, v.nodes, 0.6, t)
        assert a == pytest.approx(fractional_integral_oracle(g, v.nodes, 0.6, t), rel=1e-9, abs=1e-11)


def test_identity_single_case():
    rng = np.random.default_rng(3)
    v = random_dg(rng, N=5)
    assert identity_case(v, 0.35, np.linspace(0.01, 1.0, 17)) <= 1e-12


def test_identity_suite():
    v = check_identity()
    assert v.passed, v.format()


def test_positivity_of_constant_function():
    alpha, T = 0.5, 1.7
    lhs, rhs = positivity_case(_single(1.0, 1.0, T), alpha)
    assert lhs == pytest.approx(omega(2.0 - alpha, T), rel=1e-10)
    assert rhs == pytest.approx(positivity_constant(alpha) * T ** (1.0 - alpha), rel=1e-12)
    assert lhs >= rhs


def test_positivity_constant_value():
    a = 0.5
    want = math.sqrt(math.pi / 2.0) / 1.5**1.5 * math.cos(math.pi / 4.0)
    assert positivity_constant(a) == pytest.approx(want, rel=1e-15)


def test_continuity_equality_case():
    rng = np.random.default_rng(8)
    v = random_dg(rng, N=4, continuous=True)
    lhs, rhs = continuity_case(v, v, 0.5)
    assert lhs / rhs == pytest.approx(0.5, rel=1e-9)  # cos^2(pi/4)
    with pytest.raises(ValueError):
        continuity_case(v, random_dg(rng, N=3, continuous=True), 0.5)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_positivity_suite(alpha):
    v = check_positivity(alpha)
    assert v.passed, v.format()


@pytest.mark.parametrize("alpha", ALPHAS)
def test_continuity_suite(alpha):
    v = check_continuity(alpha)
    assert v.passed, v.format()


def test_stability_ratios_positive():
    r = stability_ratios(0.5, n_list=(10, 20))
    assert all(x > 0.0 for x in r)
    assert check_stability(0.5, n_list=(10, 20, 40)).passed


def test_verify_suite_rejects_unknown_names():
    with pytest.raises(KeyError):
        verify_suite(["kernel", "bogus"])
