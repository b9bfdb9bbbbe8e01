import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, special

from covstat.errors import DomainError, QuadratureWarning
from covstat.partition import (
    RELATIVISTIC_APPROACHES,
    ApproachKind,
    GasSpec,
    evaluate_y,
    kinetic_moments,
    ln_y,
    ln_z_canonical,
    reference_order,
    y_nonrel_asymptotic,
    y_over_m3,
    y_ultra_relativistic,
)
from covstat.specfun import gauss_laguerre_rule

RULE_40 = gauss_laguerre_rule(40)
RULE_15 = gauss_laguerre_rule(15)


def full_covariant_oracle(b):
    """4 pi * integral of r^2/(1+r^2) exp(-b (sqrt(1+r^2) - 1)) dr by adaptive quadrature."""
    upper = math.sqrt((1.0 + 80.0 / b) ** 2 - 1.0)
    peak = min(math.sqrt(2.0 / b), upper / 2.0)

    def integrand(r):
        return r * r / (1.0 + r * r) * math.exp(-b * (math.sqrt(1.0 + r * r) - 1.0))

    value, _ = integrate.quad(integrand, 0.0, upper, points=[peak], epsabs=0.0, epsrel=1e-13, limit=500)
    return 4.0 * math.pi * value


@pytest.mark.parametrize(
    "text, kind",
    [
        ("full", ApproachKind.FULL_COVARIANT),
        ("Full-Covariant", ApproachKind.FULL_COVARIANT),
        ("semi_covariant", ApproachKind.SEMI_COVARIANT),
        ("Jüttner", ApproachKind.JUTTNER),
        ("non-relativistic", ApproachKind.NON_RELATIVISTIC),
        (ApproachKind.JUTTNER, ApproachKind.JUTTNER),
    ],
)
def test_approach_parse(text, kind):
    assert ApproachKind.parse(text) is kind


def test_approach_parse_rejects_unknown_names():
    with pytest.raises(DomainError):
        ApproachKind.parse("bose")


def test_approach_properties():
    assert [a.energy_power for a in RELATIVISTIC_APPROACHES] == [-1, 0, 1]
    assert ApproachKind.SEMI_COVARIANT.column == "y_semi"
    assert not ApproachKind.NON_RELATIVISTIC.is_relativistic
    with pytest.raises(DomainError):
        ApproachKind.NON_RELATIVISTIC.energy_power


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_particles=0, mass=1.0, volume=1.0),
        dict(n_particles=2.5, mass=1.0, volume=1.0),
        dict(n_particles=True, mass=1.0, volume=1.0),
        dict(n_particles=10, mass=0.0, volume=1.0),
        dict(n_particles=10, mass=1.0, volume=-1.0),
        dict(n_particles=10, mass=float("inf"), volume=1.0),
    ],
)
def test_gas_spec_validation(kwargs):
    with pytest.raises(DomainError):
        GasSpec(**kwargs)


def test_gas_spec_number_density():
    assert GasSpec(n_particles=250, mass=1.0, volume=1e3).number_density == pytest.approx(0.25)


@pytest.mark.parametrize("beta_m", [0.0, -1.0, float("nan"), float("inf")])
def test_beta_m_domain(beta_m):
    with pytest.raises(DomainError):
        y_over_m3(ApproachKind.SEMI_COVARIANT, beta_m)


def test_unknown_method_is_rejected():
    with pytest.raises(DomainError):
        evaluate_y(ApproachKind.FULL_COVARIANT, 1.0, method="series")


def test_reference_order():
    assert reference_order(15) == 30
    assert reference_order(64) == 128
    assert reference_order(100) == 128
    assert reference_order(128) == 64


def test_nonrel_is_exact():
    for b in (0.01, 1.0, 250.0):
        assert y_over_m3(ApproachKind.NON_RELATIVISTIC, b) == pytest.approx((2.0 * math.pi / b) ** 1.5, rel=1e-15)


@pytest.mark.parametrize("kind, n", [(ApproachKind.SEMI_COVARIANT, 1), (ApproachKind.JUTTNER, 2)])
@pytest.mark.parametrize("b", [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0])
def test_quadrature_matches_bessel_closed_form(kind, n, b):
    closed = evaluate_y(kind, b, RULE_40)
    assert closed.method == "closed"
    assert closed.value == pytest.approx(4.0 * math.pi * special.kve(n, b) / b, rel=1e-10)

    at_40 = evaluate_y(kind, b, RULE_40, method="quadrature", check_convergence=False)
    assert at_40.value == pytest.approx(closed.value, rel=1e-8)
    at_15 = evaluate_y(kind, b, RULE_15, method="quadrature", check_convergence=False)
    assert at_15.value == pytest.approx(closed.value, rel=1e-4)


@pytest.mark.parametrize("b", [0.1, 1.0, 10.0, 100.0])
def test_full_covariant_matches_adaptive_quadrature(b):
    result = evaluate_y(ApproachKind.FULL_COVARIANT, b, RULE_40)
    assert result.method == "quadrature"
    assert result.converged
    assert result.reference_order == 80
    assert result.value == pytest.approx(full_covariant_oracle(b), rel=1e-8)


def test_low_order_triggers_quadrature_warning():
    with pytest.warns(QuadratureWarning):
        result = evaluate_y(ApproachKind.FULL_COVARIANT, 1.0, gauss_laguerre_rule(1))
    assert not result.converged
    assert result.relative_change > 1e-8
    assert "order 1 vs 2" in result.warning


@pytest.mark.parametrize("kind", RELATIVISTIC_APPROACHES)
def test_ultra_relativistic_limit(kind):
    b = 1e-4
    assert y_over_m3(kind, b) == pytest.approx(y_ultra_relativistic(kind, b), rel=1e-3)


def test_ultra_relativistic_domain():
    with pytest.raises(DomainError):
        y_ultra_relativistic(ApproachKind.NON_RELATIVISTIC, 0.1)
    with pytest.raises(DomainError):
        y_ultra_relativistic(ApproachKind.JUTTNER, 1e6)


@pytest.mark.parametrize(
    "kind, bound",
    [
        (ApproachKind.SEMI_COVARIANT, 0.5),
        (ApproachKind.JUTTNER, 1.0),
        (ApproachKind.FULL_COVARIANT, 5.0),
    ],
)
@pytest.mark.parametrize("b", [10.0, 100.0, 1000.0])
def test_nonrel_asymptotic_second_order_error(kind, bound, b):
    leading = (2.0 * math.pi / b) ** 1.5
    error = abs(y_over_m3(kind, b, RULE_40) - y_nonrel_asymptotic(kind, b)) / leading
    assert error <= bound / b**2


def test_nonrel_asymptotic_domain():
    assert y_nonrel_asymptotic(ApproachKind.NON_RELATIVISTIC, 10.0) == pytest.approx((2.0 * math.pi / 10.0) ** 1.5)
    with pytest.raises(DomainError):
        y_nonrel_asymptotic(ApproachKind.SEMI_COVARIANT, 9.9)


@pytest.mark.parametrize("b, tolerance", [(100.0, 0.02), (1000.0, 0.002), (5000.0, 0.002)])
def test_relativistic_approaches_reach_nonrel_at_low_temperature(b, tolerance):
    nonrel = y_over_m3(ApproachKind.NON_RELATIVISTIC, b)
    values = [y_over_m3(kind, b, RULE_40) for kind in RELATIVISTIC_APPROACHES]
    for value in values:
        assert abs(value / nonrel - 1.0) <= tolerance
    assert (max(values) - min(values)) / nonrel <= 3.5 / b


@pytest.mark.parametrize("b", [1e-3, 0.01, 0.1])
def test_high_temperature_ordering(b):
    full, semi, juttner = (y_over_m3(kind, b, RULE_40) for kind in RELATIVISTIC_APPROACHES)
    assert juttner > semi > full


@pytest.mark.parametrize("b", [0.5, 2.0, 20.0])
def test_semi_covariant_mean_excess(b):
    mean, variance = kinetic_moments(ApproachKind.SEMI_COVARIANT, b, RULE_40)
    expected = -1.0 + special.kv(0, b) / special.kv(1, b) + 2.0 / b
    assert mean == pytest.approx(expected, rel=1e-8)
    assert variance > 0.0


def test_nonrel_moments():
    assert kinetic_moments(ApproachKind.NON_RELATIVISTIC, 4.0) == pytest.approx((0.375, 0.09375))


def test_ln_y_adds_mass_cube():
    b = 3.0
    assert ln_y(ApproachKind.JUTTNER, b, 2.0) == pytest.approx(math.log(y_over_m3(ApproachKind.JUTTNER, b)) + 3.0 * math.log(2.0))


def test_ln_z_canonical_matches_arbitrary_precision():
    gas = GasSpec(n_particles=1_000_000, mass=938.8, volume=2.5e4)
    beta = 0.37 / gas.mass
    b = beta * gas.mass
    value = ln_z_canonical(gas, ApproachKind.SEMI_COVARIANT, beta)

    with mpmath.workdps(40):
        n = mpmath.mpf(gas.n_particles)
        y_free = 4 * mpmath.pi * mpmath.besselk(1, b) / b * mpmath.mpf(gas.mass) ** 3
        expected = n * mpmath.log(gas.volume) - mpmath.loggamma(n + 1) + n * mpmath.log(y_free)
    assert value == pytest.approx(float(expected), rel=1e-11)


@pytest.mark.parametrize("kind", list(ApproachKind))
def test_ln_z_canonical_doubling_identity(kind):
    small = GasSpec(n_particles=500, mass=1.5, volume=1e3)
    large = GasSpec(n_particles=1000, mass=1.5, volume=2e3)
    beta = 0.7 / small.mass
    doubled = ln_z_canonical(large, kind, beta, RULE_40)
    difference = doubled - 2.0 * ln_z_canonical(small, kind, beta, RULE_40)
    expected = -(math.lgamma(1001.0) - 2.0 * math.lgamma(501.0)) + 1000.0 * math.log(2.0)
    assert difference == pytest.approx(expected, abs=1e-10 * abs(doubled))


@pytest.mark.parametrize("kind", list(ApproachKind))
def test_y_decreases_with_beta_m(kind):
    values = np.array([y_over_m3(kind, b, RULE_40) for b in np.logspace(-3, 3, 200)])
    assert (values > 0.0).all()
    assert (np.diff(values) < 0.0).all()
