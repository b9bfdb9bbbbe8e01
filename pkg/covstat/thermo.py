"""Thermodynamics of the perfect gas from ln Y.

Units are natural with k = 1: temperature and energies share the unit of the
mass, entropy and specific heat are per Boltzmann constant, volume is in the
inverse cube of that unit.
"""

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import AccuracyError, DerivativeWarning, DomainError
from .partition import (
    ApproachKind,
    GasSpec,
    check_beta_m,
    default_rule,
    evaluate_y,
    kinetic_moments,
    rest_mass_offset,
    y_ultra_relativistic,
)
from .specfun import QuadratureRule, gauss_laguerre_rule, ln_gamma
from .utils import ordered_map

logger = logging.getLogger(__name__)

FIRST_DERIVATIVE_STEP = 1e-5
SECOND_DERIVATIVE_STEP = 1e-3
DERIVATIVE_AGREEMENT = 1e-6
DERIVATIVE_HARD_LIMIT = 1e-4

# (k, ln prefactor constant / m^3) of the ultra-relativistic rows
_ULTRA_RELATIVISTIC = {
    ApproachKind.FULL_COVARIANT: (1, math.log(4.0 * math.pi)),
    ApproachKind.SEMI_COVARIANT: (2, math.log(4.0 * math.pi)),
    ApproachKind.JUTTNER: (3, math.log(8.0 * math.pi)),
}


@dataclass(frozen=True)
class ThermoReport:
    """Thermodynamic state of N particles for one approach and temperature."""

    free_energy: float
    entropy: float
    pressure: float
    avg_energy: float
    specific_heat: float
    y_over_m3: float
    ln_z: float
    beta_m: float
    approach: ApproachKind
    temperature: float
    n_particles: int
    volume: float
    rest_mass_subtracted: bool = False
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def to_row(self) -> Dict[str, Union[float, str]]:
        return {
            "beta_m": self.beta_m,
            "approach": self.approach.value,
            "F": self.free_energy,
            "S": self.entropy,
            "P": self.pressure,
            "E_avg": self.avg_energy,
            "c_V": self.specific_heat,
            "y_over_m3": self.y_over_m3,
        }

    def as_dict(self) -> Dict:
        data = asdict(self)
        data["approach"] = self.approach.value
        data["warnings"] = list(self.warnings)
        return data


@dataclass(frozen=True)
class DerivativeCheck:
    moment: float
    finite_difference: float
    relative_difference: float


def _log_y(approach: ApproachKind, b: float, rule: QuadratureRule) -> float:
    return math.log(evaluate_y(approach, b, rule, check_convergence=False).value)


def _finite_difference(approach: ApproachKind, b: float, rule: QuadratureRule, derivative_order: int) -> float:
    """Central differences of ln(Y/m^3) in beta*m with one Richardson step."""
    if derivative_order == 1:
        h = FIRST_DERIVATIVE_STEP * b

        def central(step: float) -> float:
            return (_log_y(approach, b + step, rule) - _log_y(approach, b - step, rule)) / (2.0 * step)

    else:
        h = SECOND_DERIVATIVE_STEP * b
        centre = _log_y(approach, b, rule)

        def central(step: float) -> float:
            upper = _log_y(approach, b + step, rule)
            lower = _log_y(approach, b - step, rule)
            return (upper - 2.0 * centre + lower) / (step * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def derivative_cross_check(
    approach: Union[ApproachKind, str],
    beta_m: float,
    order: Optional[int] = None,
    derivative_order: int = 1,
) -> DerivativeCheck:
    """Both derivative methods for d^k ln(Y/m^3) / d(beta m)^k."""
    approach = ApproachKind.parse(approach)
    b = check_beta_m(beta_m)
    if derivative_order not in (1, 2):
        raise DomainError(f"derivative_order must be 1 or 2, got {derivative_order!r}")
    rule = gauss_laguerre_rule(order) if order is not None else default_rule(None)

    mean_excess, variance = kinetic_moments(approach, b, rule)
    moment = -mean_excess if derivative_order == 1 else variance
    finite = _finite_difference(approach, b, rule, derivative_order)
    scale = max(abs(moment), abs(finite), 1e-300)
    return DerivativeCheck(moment=moment, finite_difference=finite, relative_difference=abs(moment - finite) / scale)


def _checked_derivative(
    approach: ApproachKind,
    b: float,
    order: Optional[int],
    derivative_order: int,
    cross_check: bool,
) -> Tuple[float, Optional[str]]:
    if derivative_order not in (1, 2):
        raise DomainError(f"derivative_order must be 1 or 2, got {derivative_order!r}")
    if not approach.is_relativistic:
        return (-1.5 / b if derivative_order == 1 else 1.5 / (b * b)), None

    if not cross_check:
        rule = gauss_laguerre_rule(order) if order is not None else default_rule(None)
        mean_excess, variance = kinetic_moments(approach, b, rule)
        return (-mean_excess if derivative_order == 1 else variance), None

    check = derivative_cross_check(approach, b, order, derivative_order)
    if check.relative_difference > DERIVATIVE_HARD_LIMIT:
        raise AccuracyError(
            f"{approach.label} derivative {derivative_order} at beta_m={b:g}: moment {check.moment:.12g} "
            f"vs finite difference {check.finite_difference:.12g}"
        )
    note = None
    if check.relative_difference > DERIVATIVE_AGREEMENT:
        note = (
            f"{approach.label} derivative {derivative_order} at beta_m={b:g} agrees only to "
            f"{check.relative_difference:.1e}"
        )
        warnings.warn(note, DerivativeWarning, stacklevel=3)
    return check.moment, note


def d_ln_y_dbeta(
    approach: Union[ApproachKind, str],
    beta_m: float,
    order: Optional[int] = None,
    derivative_order: int = 1,
    cross_check: bool = True,
) -> float:
    """(1/m) d lnY/d beta, or (1/m^2) d^2 lnY/d beta^2 for derivative_order=2.

    The returned value comes from moment quadrature. With ``cross_check`` the
    finite-difference estimate is computed as well: a disagreement above 1e-4
    raises AccuracyError, above 1e-6 it issues a DerivativeWarning.
    """
    approach = ApproachKind.parse(approach)
    b = check_beta_m(beta_m)
    value, _ = _checked_derivative(approach, b, order, derivative_order, cross_check)
    return value


def thermo_report(
    gas: GasSpec,
    approach: Union[ApproachKind, str],
    temperature: float,
    rule: Optional[QuadratureRule] = None,
    subtract_rest_mass: bool = False,
    cross_check: bool = True,
) -> ThermoReport:
    """F, S, P, <E>, c_V for the gas at temperature kT (same unit as mass).

    ``subtract_rest_mass`` moves <E> and F down by N m for the relativistic
    approaches; the non-relativistic Y never contains the rest mass.
    """
    approach = ApproachKind.parse(approach)
    if not temperature > 0.0 or not math.isfinite(temperature):
        raise DomainError(f"temperature must be positive, got {temperature!r}")
    rule = default_rule(rule)
    n = gas.n_particles
    m = gas.mass
    b = check_beta_m(m / temperature)

    y = evaluate_y(approach, b, rule)
    d1, note1 = _checked_derivative(approach, b, rule.order, 1, cross_check)
    d2, note2 = _checked_derivative(approach, b, rule.order, 2, cross_check)
    notes = tuple(note for note in (y.warning, note1, note2) if note)

    log_y = math.log(y.value) + 3.0 * math.log(m)
    offset = rest_mass_offset(approach, b)
    log_density = math.log(gas.volume / n)

    free_energy = -n * temperature * (log_density + log_y - offset + 1.0)
    entropy = n * (log_density + log_y - b * d1 + 1.0)
    avg_energy = n * m * (offset / b - d1)
    specific_heat = n * b * b * d2
    pressure = gas.number_density * temperature
    ln_z = n * math.log(gas.volume) - ln_gamma(n + 1.0) + n * (log_y - offset)

    shifted = subtract_rest_mass and approach.is_relativistic
    if shifted:
        avg_energy -= n * m
        free_energy -= n * m

    return ThermoReport(
        free_energy=free_energy,
        entropy=entropy,
        pressure=pressure,
        avg_energy=avg_energy,
        specific_heat=specific_heat,
        y_over_m3=y.value,
        ln_z=ln_z,
        beta_m=b,
        approach=approach,
        temperature=temperature,
        n_particles=n,
        volume=gas.volume,
        rest_mass_subtracted=shifted,
        warnings=notes,
    )


def table1_closed_forms(approach: Union[ApproachKind, str], gas: GasSpec, temperature: float) -> ThermoReport:
    """Ultra-relativistic closed forms: <E> = kNT, c_V = kN with k = 1, 2, 3."""
    approach = ApproachKind.parse(approach)
    if approach not in _ULTRA_RELATIVISTIC:
        raise DomainError("the non-relativistic approach has no ultra-relativistic rows")
    if not temperature > 0.0 or not math.isfinite(temperature):
        raise DomainError(f"temperature must be positive, got {temperature!r}")
    power, log_prefactor = _ULTRA_RELATIVISTIC[approach]
    n = gas.n_particles
    m = gas.mass
    b = check_beta_m(m / temperature)

    log_y_free = log_prefactor + 3.0 * math.log(m) - power * math.log(b)
    log_density = math.log(gas.volume / n)
    return ThermoReport(
        free_energy=-n * temperature * (log_density + log_y_free + 1.0),
        entropy=n * (log_density + log_y_free + power + 1.0),
        pressure=gas.number_density * temperature,
        avg_energy=power * n * temperature,
        specific_heat=float(power * n),
        y_over_m3=y_ultra_relativistic(approach, b),
        ln_z=n * math.log(gas.volume) - ln_gamma(n + 1.0) + n * log_y_free,
        beta_m=b,
        approach=approach,
        temperature=temperature,
        n_particles=n,
        volume=gas.volume,
    )


def thermo_sweep(
    gas: GasSpec,
    approaches: Iterable[Union[ApproachKind, str]],
    temperatures: Sequence[float],
    rule: Optional[QuadratureRule] = None,
    subtract_rest_mass: bool = False,
    workers: int = 1,
) -> List[ThermoReport]:
    """Reports for every (temperature, approach) pair, temperature-major order."""
    approaches = [ApproachKind.parse(a) for a in approaches]
    rule = default_rule(rule)
    jobs = [(t, a) for t in temperatures for a in approaches]

    def run(job):
        t, a = job
        return thermo_report(gas, a, t, rule, subtract_rest_mass)

    return ordered_map(run, jobs, workers)
