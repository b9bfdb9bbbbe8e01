import math

import numpy as np
import pytest

from covstat import thermo
from covstat.errors import AccuracyError, DerivativeWarning, DomainError
from covstat.partition import RELATIVISTIC_APPROACHES, ApproachKind, GasSpec, kinetic_moments
from covstat.specfun import gauss_laguerre_rule
from covstat.thermo import (
    d_ln_y_dbeta,
    derivative_cross_check,
    table1_closed_forms,
    thermo_report,
    thermo_sweep,
)

RULE_40 = gauss_laguerre_rule(40)


@pytest.fixture
def gas():
    return GasSpec(n_particles=1000, mass=1.0, volume=5e4)


@pytest.mark.parametrize("kind", list(ApproachKind))
@pytest.mark.parametrize("subtract", [False, True])
def test_free_energy_identity(gas, kind, subtract):
    report = thermo_report(gas, kind, 0.4, RULE_40, subtract_rest_mass=subtract)
    expected = report.avg_energy - report.temperature * report.entropy
    assert report.free_energy == pytest.approx(expected, rel=1e-10, abs=1e-9 * gas.n_particles)


@pytest.mark.parametrize("kind", list(ApproachKind))
def test_ideal_gas_law(gas, kind):
    report = thermo_report(gas, kind, 2.0, RULE_40)
    assert report.pressure * gas.volume == pytest.approx(gas.n_particles * 2.0, rel=1e-14)


@pytest.mark.parametrize("temperature", [0.01, 1.0, 100.0])
def test_nonrel_equipartition(gas, temperature):
    report = thermo_report(gas, ApproachKind.NON_RELATIVISTIC, temperature)
    assert report.avg_energy == pytest.approx(1.5 * gas.n_particles * temperature, rel=1e-12)
    assert report.specific_heat == pytest.approx(1.5 * gas.n_particles, rel=1e-12)
    assert not report.rest_mass_subtracted


@pytest.mark.parametrize("power, kind", list(enumerate(RELATIVISTIC_APPROACHES, 1)))
def test_ultra_relativistic_energy_and_heat(gas, power, kind):
    temperature = 1e4 * gas.mass
    report = thermo_report(gas, kind, temperature, subtract_rest_mass=True)
    closed = table1_closed_forms(kind, gas, temperature)
    n = gas.n_particles

    assert report.rest_mass_subtracted
    assert report.avg_energy == pytest.approx(power * n * temperature, rel=0.01)
    assert report.specific_heat == pytest.approx(power * n, rel=0.01)
    assert closed.avg_energy == pytest.approx(power * n * temperature)
    assert closed.specific_heat == power * n
    assert report.entropy == pytest.approx(closed.entropy, rel=0.01)


def test_closed_forms_reject_nonrel(gas):
    with pytest.raises(DomainError):
        table1_closed_forms(ApproachKind.NON_RELATIVISTIC, gas, 1.0)


def test_low_temperature_relativistic_matches_nonrel(gas):
    temperature = gas.mass / 2000.0
    nonrel = thermo_report(gas, ApproachKind.NON_RELATIVISTIC, temperature)
    for kind in RELATIVISTIC_APPROACHES:
        report = thermo_report(gas, kind, temperature, RULE_40, subtract_rest_mass=True)
        assert report.avg_energy == pytest.approx(nonrel.avg_energy, rel=2e-3)
        assert report.specific_heat == pytest.approx(nonrel.specific_heat, rel=2e-3)


@pytest.mark.parametrize("temperature", [0.0, -1.0, float("nan")])
def test_temperature_domain(gas, temperature):
    with pytest.raises(DomainError):
        thermo_report(gas, ApproachKind.JUTTNER, temperature)


def test_derivative_methods_agree():
    for kind in RELATIVISTIC_APPROACHES:
        for derivative_order in (1, 2):
            check = derivative_cross_check(kind, 1.5, order=40, derivative_order=derivative_order)
            assert check.relative_difference < 1e-6


def test_derivative_order_domain():
    with pytest.raises(DomainError):
        derivative_cross_check(ApproachKind.SEMI_COVARIANT, 1.0, derivative_order=3)
    with pytest.raises(DomainError):
        d_ln_y_dbeta(ApproachKind.SEMI_COVARIANT, 1.0, derivative_order=0)


def test_first_derivative_is_minus_mean_excess():
    mean, _ = kinetic_moments(ApproachKind.FULL_COVARIANT, 3.0, RULE_40)
    assert d_ln_y_dbeta(ApproachKind.FULL_COVARIANT, 3.0, order=40, cross_check=False) == pytest.approx(-mean)
    assert d_ln_y_dbeta(ApproachKind.NON_RELATIVISTIC, 3.0) == pytest.approx(-0.5)


def test_disagreeing_derivatives_raise(gas, monkeypatch):
    def broken(approach, beta_m, rule=None):
        mean, variance = kinetic_moments(approach, beta_m, rule)
        return 2.0 * mean, 2.0 * variance

    monkeypatch.setattr(thermo, "kinetic_moments", broken)
    with pytest.raises(AccuracyError):
        thermo_report(gas, ApproachKind.SEMI_COVARIANT, 1.0, RULE_40)
    # without the cross-check the moment value is trusted
    thermo_report(gas, ApproachKind.SEMI_COVARIANT, 1.0, RULE_40, cross_check=False)


def test_slightly_off_derivatives_warn(gas, monkeypatch):
    def skewed(approach, beta_m, rule=None):
        mean, variance = kinetic_moments(approach, beta_m, rule)
        return mean * (1.0 + 1e-5), variance * (1.0 + 1e-5)

    monkeypatch.setattr(thermo, "kinetic_moments", skewed)
    with pytest.warns(DerivativeWarning):
        report = thermo_report(gas, ApproachKind.JUTTNER, 1.0, RULE_40)
    assert any("agrees only to" in note for note in report.warnings)


def test_report_rows(gas):
    report = thermo_report(gas, "semi", 0.5, RULE_40)
    row = report.to_row()
    assert list(row) == ["beta_m", "approach", "F", "S", "P", "E_avg", "c_V", "y_over_m3"]
    assert row["approach"] == "semi"
    assert row["beta_m"] == pytest.approx(2.0)
    data = report.as_dict()
    assert data["approach"] == "semi"
    assert data["warnings"] == []
    assert math.isfinite(report.ln_z)


def test_sweep_order_and_threads(gas):
    temperatures = [0.5, 2.0]
    approaches = ["full", "juttner"]
    serial = thermo_sweep(gas, approaches, temperatures, RULE_40)
    threaded = thermo_sweep(gas, approaches, temperatures, RULE_40, workers=3)
    assert [(r.temperature, r.approach.value) for r in serial] == [
        (0.5, "full"),
        (0.5, "juttner"),
        (2.0, "full"),
        (2.0, "juttner"),
    ]
    assert [r.to_row() for r in serial] == [r.to_row() for r in threaded]


@pytest.mark.parametrize("kind", list(ApproachKind))
def test_equation_of_state_on_random_gases(kind):
    rng = np.random.default_rng(2024)
    for _ in range(20):
        b = 10.0 ** rng.uniform(-2.0, 2.0)
        volume = 10.0 ** rng.uniform(0.0, 6.0)
        n = int(rng.integers(1, 1_000_000))
        gas = GasSpec(n_particles=n, mass=1.0, volume=volume)
        report = thermo_report(gas, kind, 1.0 / b, RULE_40, cross_check=False)
        assert report.pressure * volume / (n * report.temperature) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("temperature", [100.0, 1000.0])
def test_entropy_falls_towards_the_full_covariant_approach(gas, temperature):
    full, semi, juttner = (thermo_report(gas, kind, temperature, RULE_40).entropy for kind in RELATIVISTIC_APPROACHES)
    assert juttner > semi > full
