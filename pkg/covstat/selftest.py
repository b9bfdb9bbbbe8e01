"""Quick invariant suite run by ``python -m covstat selftest``."""

import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .constraints import GasModel, LennardJonesParams, ModelKind
from .dynamics import equilibrium_bracket, init_state, multipliers, simulate
from .errors import CovstatError
from .minkowski import boost, minkowski_dot
from .partition import ApproachKind, GasSpec, evaluate_y, y_over_m3
from .specfun import bessel_k, gauss_laguerre_rule, ln_gamma
from .thermo import thermo_report


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    execution_time: float


def _boost_invariance() -> Tuple[bool, str]:
    rng = np.random.default_rng(7)
    a = rng.normal(size=(200, 4))
    b = rng.normal(size=(200, 4))
    worst = 0.0
    for row in range(200):
        velocity = rng.uniform(-0.55, 0.55, size=3)
        before = minkowski_dot(a[row], b[row])
        after = minkowski_dot(boost(a[row], velocity), boost(b[row], velocity))
        worst = max(worst, abs(after - before) / max(abs(before), 1.0))
    return worst <= 1e-10, f"max relative change {worst:.1e}"


def _laguerre_exactness() -> Tuple[bool, str]:
    rule = gauss_laguerre_rule(15)
    worst = 0.0
    for k in range(2 * rule.order):
        exact = math.factorial(k)
        worst = max(worst, abs(rule.integrate(rule.nodes**k) - exact) / exact)
    return worst <= 1e-10, f"degree 0..{2 * rule.order - 1}, max relative error {worst:.1e}"


def _bessel_recurrence() -> Tuple[bool, str]:
    worst = 0.0
    for x in (0.1, 1.0, 5.0, 30.0):
        lhs = bessel_k(2, x)
        rhs = bessel_k(0, x) + 2.0 / x * bessel_k(1, x)
        worst = max(worst, abs(lhs - rhs) / lhs)
    gamma_error = max(abs(ln_gamma(x) - math.lgamma(x)) for x in (0.5, 3.7, 25.0, 171.5))
    return worst <= 1e-10 and gamma_error <= 1e-10, f"K recurrence {worst:.1e}, ln Gamma {gamma_error:.1e}"


def _semi_closed_form() -> Tuple[bool, str]:
    rule = gauss_laguerre_rule(40)
    worst = 0.0
    for b in (0.1, 1.0, 2.0, 10.0, 50.0):
        quad = evaluate_y(ApproachKind.SEMI_COVARIANT, b, rule, method="quadrature", check_convergence=False).value
        closed = y_over_m3(ApproachKind.SEMI_COVARIANT, b, rule)
        worst = max(worst, abs(quad - closed) / closed)
    return worst <= 1e-8, f"order 40, max relative error {worst:.1e}"


def _ultra_relativistic_limit() -> Tuple[bool, str]:
    gas = GasSpec(n_particles=100, mass=1.0, volume=1e3)
    temperature = 1e4
    worst = 0.0
    for power, kind in enumerate((ApproachKind.FULL_COVARIANT, ApproachKind.SEMI_COVARIANT, ApproachKind.JUTTNER), 1):
        report = thermo_report(gas, kind, temperature, subtract_rest_mass=True)
        worst = max(
            worst,
            abs(report.avg_energy / (gas.n_particles * temperature) - power) / power,
            abs(report.specific_heat / gas.n_particles - power) / power,
        )
        pv = report.pressure * gas.volume / (gas.n_particles * temperature)
        if abs(pv - 1.0) > 1e-12:
            return False, f"PV/NkT = {pv!r}"
    return worst <= 0.01, f"beta_m = 1e-4, max relative deviation {worst:.1e}"


def _multiplier_closed_forms() -> Tuple[bool, str]:
    worst = 0.0
    for kind, closed in (
        (ModelKind.PERFECT_SIMPLE, lambda s: s.masses / s.p[:, 0]),
        (ModelKind.PERFECT_COVARIANT, lambda s: s.masses**2 / minkowski_dot(s.p, s.p)),
    ):
        model = GasModel(kind)
        state = init_state(model, 5, seed=3, momentum_scale=0.8)
        worst = max(worst, float(np.max(np.abs(multipliers(model, state) - closed(state)))))
    return worst <= 1e-10, f"max deviation {worst:.1e}"


def _short_trajectories() -> Tuple[bool, str]:
    worst = 0.0
    models = [
        (GasModel(ModelKind.PERFECT_COVARIANT), dict(box=5.0, momentum_scale=0.3)),
        (GasModel(ModelKind.PERFECT_SIMPLE), dict(box=5.0, momentum_scale=0.3)),
        (GasModel(ModelKind.REAL_GAS, LennardJonesParams(kappa=0.01, sigma=1.0)), dict(box=2.0, momentum_scale=0.02)),
    ]
    for model, options in models:
        n = 2 if model.is_real else 4
        state = init_state(model, n, seed=11, **options)
        trajectory = simulate(model, state, dtau=0.01, steps=50)
        worst = max(worst, trajectory.max_residual)
    return worst <= 1e-8, f"50 steps per model, max residual {worst:.1e}"


def _equilibrium_condition() -> Tuple[bool, str]:
    model = GasModel(ModelKind.PERFECT_COVARIANT)
    state = init_state(model, 4, seed=5, momentum_scale=0.5)
    value = abs(equilibrium_bracket(model, state))
    return value <= 1e-12, f"|sum lambda {{U.P, psi}}| = {value:.1e}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("minkowski: dot invariant under boosts", _boost_invariance),
    ("specfun: Gauss-Laguerre exactness", _laguerre_exactness),
    ("specfun: Bessel recurrence and ln Gamma", _bessel_recurrence),
    ("partition: semi-covariant quadrature vs closed form", _semi_closed_form),
    ("thermo: ultra-relativistic limit and PV = NkT", _ultra_relativistic_limit),
    ("dynamics: multiplier closed forms", _multiplier_closed_forms),
    ("dynamics: constraint preservation", _short_trajectories),
    ("dynamics: perfect-gas equilibrium bracket", _equilibrium_condition),
]


def run_selftest() -> List[CheckResult]:
    results = []
    for name, check in CHECKS:
        start_time = time.time()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                passed, detail = check()
        except CovstatError as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.time() - start_time))
    return results
