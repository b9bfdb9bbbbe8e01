"""Generic per-particle quantity Y and the canonical partition integral.

Everything here is dimensionless in beta*m and returns Y/m^3, where

    Z_C = (V^N / N!) (e^{-beta m} Y)^N.

The momentum integral is rewritten in u = beta (sqrt(rho^2 + m^2) - m), the
kinetic energy in units of kT, so the rest-mass factor e^{-beta m} comes out
exactly and the remaining integrand carries the weight e^{-u}:

    Y/m^3 = (4 pi / beta m) * integral_0^inf e^{-u} g(u) du,
    g(u)  = rho_hat * e_hat^k,

with rho_hat = rho/m, e_hat = E/m and k = -1, 0, +1 for the full covariant,
semi-covariant and Juttner treatments. Near threshold rho_hat ~ sqrt(u), so
the window u < U is integrated in t = sqrt(u) on graded Gauss-Legendre panels
and only the smooth tail is handed to Gauss-Laguerre.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np

from .config import CONVERGENCE_TOLERANCE, get_settings
from .errors import DomainError, QuadratureWarning
from .specfun import (
    MAX_LAGUERRE_ORDER,
    QuadratureRule,
    bessel_k_scaled,
    composite_legendre,
    gauss_laguerre_rule,
    ln_gamma,
)

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi
ASYMPTOTIC_MIN_BETA_M = 10.0

# kinetic energy window (units of kT) handled in t = sqrt(u)
THRESHOLD_WINDOW = 4.0
_WINDOW_LEVELS = 50

Method = Literal["auto", "quadrature"]


class ApproachKind(str, Enum):
    """Phase-space treatment of the perfect gas."""

    FULL_COVARIANT = "full"
    SEMI_COVARIANT = "semi"
    JUTTNER = "juttner"
    NON_RELATIVISTIC = "nonrel"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def is_relativistic(self) -> bool:
        return self is not ApproachKind.NON_RELATIVISTIC

    @property
    def energy_power(self) -> int:
        """Power k of E/m multiplying rho/m in the substituted integrand."""
        if not self.is_relativistic:
            raise DomainError("the non-relativistic integrand has no energy power")
        return _ENERGY_POWERS[self]

    @property
    def column(self) -> str:
        return f"y_{self.value}"

    @classmethod
    def parse(cls, value: Union[str, "ApproachKind"]) -> "ApproachKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        try:
            return _ALIASES[key]
        except KeyError:
            choices = ", ".join(a.value for a in cls)
            raise DomainError(f"unknown approach {value!r} (expected one of {choices})") from None


_LABELS = {
    ApproachKind.FULL_COVARIANT: "full covariant",
    ApproachKind.SEMI_COVARIANT: "semi-covariant",
    ApproachKind.JUTTNER: "Juttner",
    ApproachKind.NON_RELATIVISTIC: "non-relativistic",
}
_ENERGY_POWERS = {
    ApproachKind.FULL_COVARIANT: -1,
    ApproachKind.SEMI_COVARIANT: 0,
    ApproachKind.JUTTNER: 1,
}
_ALIASES = {
    "full": ApproachKind.FULL_COVARIANT,
    "fullcovariant": ApproachKind.FULL_COVARIANT,
    "semi": ApproachKind.SEMI_COVARIANT,
    "semicovariant": ApproachKind.SEMI_COVARIANT,
    "juttner": ApproachKind.JUTTNER,
    "jüttner": ApproachKind.JUTTNER,
    "nonrel": ApproachKind.NON_RELATIVISTIC,
    "nonrelativistic": ApproachKind.NON_RELATIVISTIC,
}

RELATIVISTIC_APPROACHES = (
    ApproachKind.FULL_COVARIANT,
    ApproachKind.SEMI_COVARIANT,
    ApproachKind.JUTTNER,
)


@dataclass(frozen=True)
class GasSpec:
    """Monatomic perfect gas: N particles of rest mass m in rest-frame volume V."""

    n_particles: int
    mass: float
    volume: float

    def __post_init__(self):
        if isinstance(self.n_particles, bool) or int(self.n_particles) != self.n_particles or self.n_particles < 1:
            raise DomainError(f"n_particles must be a positive integer, got {self.n_particles!r}")
        if not self.mass > 0.0 or not math.isfinite(self.mass):
            raise DomainError(f"mass must be positive, got {self.mass!r}")
        if not self.volume > 0.0 or not math.isfinite(self.volume):
            raise DomainError(f"volume must be positive, got {self.volume!r}")

    @property
    def number_density(self) -> float:
        return self.n_particles / self.volume


@dataclass(frozen=True)
class YResult:
    """Y/m^3 with its convergence bookkeeping."""

    value: float
    approach: ApproachKind
    beta_m: float
    order: int
    method: str
    reference_order: Optional[int] = None
    relative_change: float = 0.0
    converged: bool = True
    warning: Optional[str] = None


def check_beta_m(beta_m: float) -> float:
    b = float(beta_m)
    if not b > 0.0 or not math.isfinite(b):
        raise DomainError(f"beta_m must be positive and finite, got {beta_m!r}")
    return b


def default_rule(rule: Optional[QuadratureRule]) -> QuadratureRule:
    if rule is None:
        return gauss_laguerre_rule(get_settings().quadrature_order)
    return rule


def reference_order(order: int) -> int:
    """Order used for the doubling check (halved at the top of the range)."""
    doubled = min(2 * order, MAX_LAGUERRE_ORDER)
    return doubled if doubled != order else max(order // 2, 1)


@lru_cache(maxsize=1)
def _threshold_window() -> Tuple[np.ndarray, np.ndarray]:
    """Nodes in u and weights for the window [0, U] integrated in t = sqrt(u)."""
    top = math.sqrt(THRESHOLD_WINDOW)
    edges = [0.0] + [top * 0.5 ** level for level in range(_WINDOW_LEVELS, -1, -1)]
    t, w = composite_legendre(edges)
    # du = 2 t dt and the e^{-u} weight folded in
    u = t * t
    weights = w * 2.0 * t * np.exp(-u)
    u.setflags(write=False)
    weights.setflags(write=False)
    return u, weights


def _integrand(approach: ApproachKind, u: np.ndarray, b: float) -> np.ndarray:
    v = u / b
    if not approach.is_relativistic:
        return np.sqrt(2.0 * v)
    rho = np.sqrt(v * (2.0 + v))
    return rho * (1.0 + v) ** approach.energy_power


def _u_moments(approach: ApproachKind, b: float, rule: QuadratureRule, powers: Sequence[int]) -> np.ndarray:
    """Integrals of e^{-u} g(u) u^j over (0, inf) for each j in powers."""
    window_u, window_w = _threshold_window()
    tail_u = THRESHOLD_WINDOW + rule.nodes
    tail_w = math.exp(-THRESHOLD_WINDOW) * rule.weights

    g_window = _integrand(approach, window_u, b)
    g_tail = _integrand(approach, tail_u, b)
    return np.array(
        [np.dot(window_w, g_window * window_u**j) + np.dot(tail_w, g_tail * tail_u**j) for j in powers]
    )


def _quadrature_y(approach: ApproachKind, b: float, rule: QuadratureRule) -> float:
    (m0,) = _u_moments(approach, b, rule, (0,))
    return FOUR_PI / b * float(m0)


def _closed_form_y(approach: ApproachKind, b: float) -> Optional[float]:
    if approach is ApproachKind.SEMI_COVARIANT:
        return FOUR_PI * bessel_k_scaled(1, b) / b
    if approach is ApproachKind.JUTTNER:
        return FOUR_PI * bessel_k_scaled(2, b) / b
    if approach is ApproachKind.NON_RELATIVISTIC:
        return (2.0 * math.pi / b) ** 1.5
    return None


def evaluate_y(
    approach: Union[ApproachKind, str],
    beta_m: float,
    rule: Optional[QuadratureRule] = None,
    method: Method = "auto",
    check_convergence: bool = True,
) -> YResult:
    """Y/m^3 plus the result of the order-doubling convergence check.

    ``method="auto"`` uses the Bessel closed forms where they exist and
    quadrature for the full covariant integrand; ``"quadrature"`` forces the
    quadrature path for every approach.
    """
    approach = ApproachKind.parse(approach)
    b = check_beta_m(beta_m)
    rule = default_rule(rule)
    if method not in ("auto", "quadrature"):
        raise DomainError(f"unknown method {method!r}")

    if method == "auto":
        closed = _closed_form_y(approach, b)
        if closed is not None:
            return YResult(value=closed, approach=approach, beta_m=b, order=rule.order, method="closed")

    value = _quadrature_y(approach, b, rule)
    if not check_convergence:
        return YResult(value=value, approach=approach, beta_m=b, order=rule.order, method="quadrature")

    ref_order = reference_order(rule.order)
    reference = _quadrature_y(approach, b, gauss_laguerre_rule(ref_order))
    change = abs(value - reference) / abs(reference)
    converged = change <= CONVERGENCE_TOLERANCE
    warning = None
    if not converged:
        warning = (
            f"{approach.label} Y at beta_m={b:g}: order {rule.order} vs {ref_order} "
            f"differ by {change:.2e} relative"
        )
        warnings.warn(warning, QuadratureWarning, stacklevel=2)
    return YResult(
        value=value,
        approach=approach,
        beta_m=b,
        order=rule.order,
        method="quadrature",
        reference_order=ref_order,
        relative_change=change,
        converged=converged,
        warning=warning,
    )


def y_over_m3(
    approach: Union[ApproachKind, str],
    beta_m: float,
    rule: Optional[QuadratureRule] = None,
    method: Method = "auto",
) -> float:
    """Y/m^3 for one approach at one beta*m (see evaluate_y)."""
    return evaluate_y(approach, beta_m, rule, method).value


def ln_y(approach: Union[ApproachKind, str], beta_m: float, mass: float, rule: Optional[QuadratureRule] = None) -> float:
    """ln Y = ln(Y/m^3) + 3 ln m."""
    return math.log(y_over_m3(approach, beta_m, rule)) + 3.0 * math.log(mass)


def kinetic_moments(
    approach: Union[ApproachKind, str], beta_m: float, rule: Optional[QuadratureRule] = None
) -> Tuple[float, float]:
    """Mean and variance of E/m - 1 under the Y integrand.

    These are -d ln(Y/m^3)/d(beta m) and d^2 ln(Y/m^3)/d(beta m)^2, computed by
    differentiating under the integral sign.
    """
    approach = ApproachKind.parse(approach)
    b = check_beta_m(beta_m)
    rule = default_rule(rule)
    if not approach.is_relativistic:
        return 1.5 / b, 1.5 / (b * b)
    m0, m1, m2 = _u_moments(approach, b, rule, (0, 1, 2))
    mean_u = m1 / m0
    var_u = max(m2 / m0 - mean_u * mean_u, 0.0)
    return float(mean_u / b), float(var_u / (b * b))


def y_ultra_relativistic(approach: Union[ApproachKind, str], beta_m: float) -> float:
    """Closed ultra-relativistic forms e^{beta m} * {4pi/bm, 4pi/bm^2, 8pi/bm^3}."""
    approach = ApproachKind.parse(approach)
    b = check_beta_m(beta_m)
    if approach is ApproachKind.FULL_COVARIANT:
        log_bracket = math.log(FOUR_PI) - math.log(b)
    elif approach is ApproachKind.SEMI_COVARIANT:
        log_bracket = math.log(FOUR_PI) - 2.0 * math.log(b)
    elif approach is ApproachKind.JUTTNER:
        log_bracket = math.log(2.0 * FOUR_PI) - 3.0 * math.log(b)
    else:
        raise DomainError("the non-relativistic approach has no ultra-relativistic limit")
    try:
        return math.exp(b + log_bracket)
    except OverflowError:
        raise DomainError(f"ultra-relativistic Y overflows at beta_m={b:g}") from None


def y_nonrel_asymptotic(approach: Union[ApproachKind, str], beta_m: float) -> float:
    """Leading term (2 pi / bm)^{3/2} with the first 1/bm correction.

    The corrections are (4n^2 - 1)/(8 bm) for the Bessel forms (n=1 semi,
    n=2 Juttner) and -9/(8 bm) for the full covariant integrand, from the same
    expansion of the momentum integral around rho = 0.
    """
    approach = ApproachKind.parse(approach)
    b = float(beta_m)
    if not b >= ASYMPTOTIC_MIN_BETA_M:
        raise DomainError(f"the asymptotic form needs beta_m >= {ASYMPTOTIC_MIN_BETA_M:g}, got {beta_m!r}")
    leading = (2.0 * math.pi / b) ** 1.5
    if not approach.is_relativistic:
        return leading
    k = approach.energy_power
    return leading * (1.0 + 3.0 * (1.0 + 4.0 * k) / (8.0 * b))


def rest_mass_offset(approach: ApproachKind, beta_m: float) -> float:
    """The beta*m subtracted in ln(e^{-beta m} Y); zero without rest mass."""
    return beta_m if approach.is_relativistic else 0.0


def ln_z_canonical(
    gas: GasSpec,
    approach: Union[ApproachKind, str],
    beta: float,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """ln Z_C = N ln V - ln Gamma(N+1) + N (ln Y - beta m), all in log space."""
    approach = ApproachKind.parse(approach)
    b = check_beta_m(beta * gas.mass)
    n = gas.n_particles
    log_y = ln_y(approach, b, gas.mass, rule)
    value = n * math.log(gas.volume) - ln_gamma(n + 1.0) + n * (log_y - rest_mass_offset(approach, b))
    logger.debug("ln Z_C(%s, N=%d, beta_m=%g) = %.12g", approach.value, n, b, value)
    return value
