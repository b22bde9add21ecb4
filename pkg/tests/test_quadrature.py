import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.laguerre import laggauss
from scipy.special import exp1

from wssus_capacity.errors import NonConvergence
from wssus_capacity.quadrature import (
    _GWEIGHTS,
    _KWEIGHTS,
    _NODES,
    Tolerance,
    expect_complex_gaussian_2d,
    expect_exponential,
    hermite_rule,
    integrate_1d,
    integrate_2d,
    laguerre_rule,
)


def test_kronrod_rule_is_exact_for_degree_22():
    for degree in range(23):
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert np.dot(_KWEIGHTS, _NODES**degree) == pytest.approx(exact, abs=1e-14)
    for degree in range(14):
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert np.dot(_GWEIGHTS, _NODES**degree) == pytest.approx(exact, abs=1e-14)


def test_constant():
    assert integrate_1d(lambda x: np.ones_like(x), 0.0, 1.0) == pytest.approx(1.0, rel=1e-15)


def test_log1p_antiderivative():
    # (1+x) log(1+x) - x on [0, 1]
    assert integrate_1d(np.log1p, 0.0, 1.0) == pytest.approx(2 * math.log(2) - 1, rel=1e-12)


def test_sinc_against_trapezoid_oracle():
    x = np.linspace(0.0, 4.0, 1_000_001)
    oracle = np.trapezoid(np.sinc(x), x)
    assert integrate_1d(np.sinc, 0.0, 4.0) == pytest.approx(oracle, abs=1e-8)


def test_error_bound_reported():
    value, err = integrate_1d(np.exp, 0.0, 1.0, full_output=True)
    assert abs(value - (math.e - 1)) <= max(err, 1e-15)
    assert err <= 1e-9 * value


def test_breakpoints_handle_kinks():
    value = integrate_1d(np.abs, -1.0, 2.0, points=[0.0])
    assert value == pytest.approx(2.5, rel=1e-14)


def test_nonconvergence_carries_estimate():
    tol = Tolerance(rel=1e-14, max_subdivisions=3)
    with pytest.raises(NonConvergence) as info:
        integrate_1d(lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, tol)
    exact = (0.3**1.5 + 0.7**1.5) / 1.5
    assert info.value.estimate == pytest.approx(exact, rel=1e-3)
    assert info.value.error > 0


def test_rejects_empty_interval():
    with pytest.raises(ValueError):
        integrate_1d(np.sin, 1.0, 1.0)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel=0.0, abs=0.0)
    with pytest.raises(ValueError):
        Tolerance(max_subdivisions=0)


@pytest.mark.parametrize("rel", [1e-4, 1e-6, 1e-8, 1e-10])
def test_refinement_never_increases_error_bound(rel):
    f = lambda x: np.exp(np.sin(7 * x)) * np.log1p(x)
    _, loose = integrate_1d(f, 0.0, 3.0, Tolerance(rel=rel), full_output=True)
    _, tight = integrate_1d(f, 0.0, 3.0, Tolerance(rel=rel / 2), full_output=True)
    assert tight <= loose


@settings(max_examples=30, deadline=None)
@given(
    coeffs_f=st.lists(st.floats(-5, 5), min_size=1, max_size=6),
    coeffs_g=st.lists(st.floats(-5, 5), min_size=1, max_size=6),
    a=st.floats(-3, 3),
    c=st.floats(-3, 3),
)
def test_linearity(coeffs_f, coeffs_g, a, c):
    f = np.polynomial.Polynomial(coeffs_f)
    g = np.polynomial.Polynomial(coeffs_g)
    tol = Tolerance(rel=1e-10, abs=1e-12)
    lhs = integrate_1d(lambda x: a * f(x) + c * g(x), -1.0, 2.0, tol)
    rhs = a * integrate_1d(f, -1.0, 2.0, tol) + c * integrate_1d(g, -1.0, 2.0, tol)
    scale = abs(a) * integrate_1d(lambda x: np.abs(f(x)), -1.0, 2.0, tol) + abs(c) * integrate_1d(
        lambda x: np.abs(g(x)), -1.0, 2.0, tol
    )
    assert abs(lhs - rhs) <= 2 * (1e-10 * scale + 1e-12) + 1e-13


def test_2d_constant():
    assert integrate_2d(lambda t, n: 3.5 * np.ones_like(t), (0, 1, 0, 1)) == pytest.approx(3.5, rel=1e-14)


def test_2d_constant_penalty_integrand():
    kappa, sigma2, spread = 1e3, 1e-9, 1e-3
    half_tau, half_nu = 0.5e-6, 500.0
    assert 4 * half_tau * half_nu == pytest.approx(spread)
    value = integrate_2d(
        lambda t, n: np.full_like(t, math.log1p(kappa * sigma2 / spread)),
        (-half_tau, half_tau, -half_nu, half_nu),
    )
    assert value == pytest.approx(spread * math.log1p(kappa * sigma2 / spread), rel=1e-12)


def test_2d_separable_fubini():
    g = lambda t: np.exp(-t)
    h = lambda n: np.cos(n) ** 2
    tol = Tolerance(rel=1e-10)
    product = integrate_1d(g, 0, 2, tol) * integrate_1d(h, -1, 3, tol)
    value, err = integrate_2d(lambda t, n: g(t) * h(n), (0, 2, -1, 3), tol, full_output=True)
    assert abs(value - product) <= 3e-10 * abs(product) + err


def test_2d_degenerate_rectangle():
    with pytest.raises(ValueError):
        integrate_2d(lambda t, n: t, (0, 0, 0, 1))


@pytest.mark.parametrize("order", [8, 32, 64, 128])
def test_laguerre_rule_matches_numpy(order):
    x, w = laguerre_rule(order)
    if order <= 128:
        x_ref, w_ref = laggauss(order)
        np.testing.assert_allclose(x, x_ref, rtol=1e-9)
        big = w_ref > 1e-200
        np.testing.assert_allclose(w[big], w_ref[big], rtol=1e-6, atol=1e-15)
    assert w.sum() == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("order", [8, 32, 64])
def test_hermite_rule_matches_numpy(order):
    x, w = hermite_rule(order)
    x_ref, w_ref = hermgauss(order)
    np.testing.assert_allclose(x, x_ref, rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(w, w_ref, rtol=1e-6, atol=1e-15)


def test_rules_are_cached_and_read_only():
    assert laguerre_rule(64)[0] is laguerre_rule(64)[0]
    with pytest.raises(ValueError):
        hermite_rule(16)[0][0] = 1.0


def test_expect_exponential_moments():
    assert expect_exponential(lambda x: np.ones_like(x), 3.0) == pytest.approx(1.0, rel=1e-12)
    for mean in (1e-9, 0.5, 7.0):
        assert expect_exponential(lambda x: x, mean) == pytest.approx(mean, rel=1e-10)


def test_expect_exponential_log1p_against_independent_quadrature():
    # Adaptive integral on [0, 50] plus a tail bound: the tail of
    # log(1+x) e^-x beyond 50 is below 51 * log(51) * e^-50 < 1e-19.
    oracle = integrate_1d(lambda x: np.log1p(x) * np.exp(-x), 0.0, 50.0, Tolerance(rel=1e-13))
    assert oracle == pytest.approx(math.e * exp1(1.0), rel=1e-12)
    assert expect_exponential(np.log1p, 1.0) == pytest.approx(oracle, rel=1e-12)
    assert oracle == pytest.approx(0.596347, abs=1e-6)


def test_expect_complex_gaussian_moments():
    assert expect_complex_gaussian_2d(lambda a, b: np.ones_like(a)) == pytest.approx(1.0, rel=1e-12)
    assert expect_complex_gaussian_2d(lambda a, b: a**2 + b**2) == pytest.approx(1.0, abs=1e-10)


def test_expect_complex_gaussian_closed_form_and_monte_carlo():
    value = expect_complex_gaussian_2d(lambda a, b: np.exp(-(a**2 + b**2)))
    assert value == pytest.approx(0.5, abs=1e-8)
    rng = np.random.default_rng(11)
    z = (rng.standard_normal(10_000_000) + 1j * rng.standard_normal(10_000_000)) / math.sqrt(2)
    samples = np.exp(-np.abs(z) ** 2)
    se = samples.std() / math.sqrt(samples.size)
    assert abs(samples.mean() - value) < 4 * se


def _random_integrands(seed):
    rng = np.random.default_rng(seed)
    integrands = []
    for _ in range(20):
        a, b, c = rng.uniform(0.1, 3.0, 3)
        kind = rng.integers(3)
        if kind == 0:
            integrands.append(lambda x, a=a, b=b: np.log1p(a * x) * np.cos(b * np.sqrt(x)))
        elif kind == 1:
            integrands.append(lambda x, a=a, c=c: np.tanh(a * x) + c / (1 + x))
        else:
            integrands.append(lambda x, b=b: np.exp(-b * x) * x**2)
    return integrands


def test_expect_exponential_against_monte_carlo():
    rng = np.random.default_rng(2024)
    for k, g in enumerate(_random_integrands(5)):
        mean = 0.5 + k / 10
        x = rng.exponential(mean, 1_000_000)
        samples = g(x)
        se = samples.std() / 1000.0
        assert abs(expect_exponential(g, mean) - samples.mean()) < 4 * se


def test_expect_complex_gaussian_against_monte_carlo():
    rng = np.random.default_rng(99)
    for k in range(20):
        a, b = rng.uniform(0.2, 2.0, 2)
        g = lambda re, im, a=a, b=b: np.log1p(a * (re**2 + im**2)) + np.cos(b * re) * im**2
        re = rng.standard_normal(1_000_000) / math.sqrt(2)
        im = rng.standard_normal(1_000_000) / math.sqrt(2)
        samples = g(re, im)
        se = samples.std() / 1000.0
        assert abs(expect_complex_gaussian_2d(g) - samples.mean()) < 4 * se
