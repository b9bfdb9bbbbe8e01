import math

import numpy as np
import pytest
from scipy import special

from covstat.errors import DomainError, EvaluationError, UnderflowWarning
from covstat.specfun import (
    bessel_k,
    bessel_k_asymptotic,
    bessel_k_scaled,
    composite_legendre,
    gauss_laguerre_rule,
    integrate_laguerre,
    ln_gamma,
)


@pytest.mark.parametrize("order", [1, 2, 5, 15])
def test_laguerre_rule_is_exact_through_degree_2n_minus_1(order):
    rule = gauss_laguerre_rule(order)
    for k in range(2 * order):
        exact = math.factorial(k)
        assert rule.integrate(rule.nodes**k) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("order", [15, 30])
def test_laguerre_rule_matches_scipy(order):
    rule = gauss_laguerre_rule(order)
    nodes, weights = special.roots_laguerre(order)
    np.testing.assert_allclose(rule.nodes, nodes, rtol=1e-10)
    significant = weights > 1e-20
    np.testing.assert_allclose(rule.weights[significant], weights[significant], rtol=1e-8)
    np.testing.assert_allclose(rule.weights[~significant], weights[~significant], rtol=0.0, atol=1e-20)
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-12)


def test_laguerre_rule_is_cached_and_read_only():
    rule = gauss_laguerre_rule(20)
    assert gauss_laguerre_rule(20) is rule
    with pytest.raises(ValueError):
        rule.nodes[0] = 1.0


@pytest.mark.parametrize("order", [0, 129, -3, 2.5, True, "15"])
def test_laguerre_rule_rejects_bad_orders(order):
    with pytest.raises(DomainError):
        gauss_laguerre_rule(order)


def test_integrate_laguerre_falls_back_to_scalar_calls():
    rule = gauss_laguerre_rule(2)
    assert integrate_laguerre(lambda x: math.pow(x, 3), rule) == pytest.approx(6.0)
    assert integrate_laguerre(lambda x: x**3, rule) == pytest.approx(6.0)


def test_integrate_laguerre_reports_the_bad_node():
    rule = gauss_laguerre_rule(8)
    target = rule.nodes[3]
    with pytest.raises(EvaluationError) as info:
        integrate_laguerre(lambda x: np.where(x == target, np.inf, 1.0), rule)
    assert info.value.node == pytest.approx(target)


def test_integrate_laguerre_converges_for_a_pole_on_the_negative_axis():
    exact = math.e * special.exp1(1.0)
    errors = [
        abs(integrate_laguerre(lambda x: 1.0 / (1.0 + x), gauss_laguerre_rule(order)) - exact)
        for order in (5, 10, 20, 30, 40)
    ]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
    assert errors[0] < 5e-3
    assert abs(integrate_laguerre(lambda x: 1.0 / (1.0 + x), gauss_laguerre_rule(60)) - exact) < 1e-9


def test_composite_legendre_integrates_polynomials_per_panel():
    nodes, weights = composite_legendre([0.0, 0.5, 2.0, 3.0], points=4)
    assert np.dot(weights, nodes**5) == pytest.approx(3.0**6 / 6.0)


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("x", [0.01, 0.1, 1.0, 5.0, 30.0, 100.0, 500.0])
def test_bessel_k_matches_scipy(n, x):
    assert bessel_k(n, x) == pytest.approx(special.kv(n, x), rel=1e-10)
    assert bessel_k_scaled(n, x) == pytest.approx(special.kve(n, x), rel=1e-10)


@pytest.mark.parametrize("x", [0.05, 0.7, 2.0, 12.0, 80.0])
def test_bessel_recurrence(x):
    assert bessel_k(2, x) == pytest.approx(bessel_k(0, x) + 2.0 / x * bessel_k(1, x), rel=1e-10)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_bessel_k_is_positive_and_decreasing(n):
    values = np.array([bessel_k(n, x) for x in np.logspace(-2, 2.5, 60)])
    assert (values > 0.0).all()
    assert (np.diff(values) < 0.0).all()


def test_bessel_k_grows_with_order():
    for x in (0.1, 1.0, 10.0, 100.0):
        assert bessel_k(0, x) < bessel_k(1, x) < bessel_k(2, x)


def test_bessel_k_underflows_with_warning():
    with pytest.warns(UnderflowWarning):
        assert bessel_k(1, 800.0) == 0.0
    assert bessel_k_scaled(1, 800.0) == pytest.approx(special.kve(1, 800.0), rel=1e-10)


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("x", [30.0, 50.0, 200.0])
def test_asymptotic_form_within_next_correction(n, x):
    two_terms = bessel_k_asymptotic(n, x, terms=2)
    three_terms = bessel_k_asymptotic(n, x, terms=3)
    assert abs(bessel_k(n, x) - two_terms) <= 1.5 * abs(three_terms - two_terms)


@pytest.mark.parametrize("n, x", [(3, 1.0), (1, 0.0), (0, -2.0), (2, float("nan"))])
def test_bessel_domain(n, x):
    with pytest.raises(DomainError):
        bessel_k(n, x)


@pytest.mark.parametrize("x", [1e-3, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 25.0, 171.5, 1e6 + 1.0])
def test_ln_gamma_matches_lgamma(x):
    assert ln_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-13)


def test_ln_gamma_special_values():
    assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, float("inf")])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)
