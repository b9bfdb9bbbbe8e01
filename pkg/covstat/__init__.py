"""Covariant statistical mechanics of the relativistic monatomic gas."""

__version__ = "0.1.0"

from .constraints import (
    GasModel,
    LennardJonesParams,
    ModelKind,
    ParticleState,
    PhaseFunction,
    SystemState,
    constraint_function,
    constraint_values,
    invariant_energy,
    lj_tilde,
    lj_tilde_gradient,
    poisson_bracket,
    transverse_distance_sq,
    weighting,
    weighting_derivative,
)
from .dynamics import (
    Trajectory,
    boost_state,
    c_matrix,
    equilibrium_bracket,
    flow_derivatives,
    init_state,
    multipliers,
    newtonian_reference,
    project,
    simulate,
    step,
    total_momentum,
)
from .minkowski import FourVector, boost, dot
from .partition import (
    ApproachKind,
    GasSpec,
    YResult,
    evaluate_y,
    kinetic_moments,
    ln_y,
    ln_z_canonical,
    y_nonrel_asymptotic,
    y_over_m3,
    y_ultra_relativistic,
)
from .specfun import (
    QuadratureRule,
    bessel_k,
    bessel_k_asymptotic,
    bessel_k_scaled,
    gauss_laguerre_rule,
    integrate_laguerre,
    ln_gamma,
)
from .thermo import (
    ThermoReport,
    d_ln_y_dbeta,
    derivative_cross_check,
    table1_closed_forms,
    thermo_report,
    thermo_sweep,
)

__all__ = [
    "ApproachKind",
    "FourVector",
    "GasModel",
    "GasSpec",
    "LennardJonesParams",
    "ModelKind",
    "ParticleState",
    "PhaseFunction",
    "QuadratureRule",
    "SystemState",
    "ThermoReport",
    "Trajectory",
    "YResult",
    "bessel_k",
    "bessel_k_asymptotic",
    "bessel_k_scaled",
    "boost",
    "boost_state",
    "c_matrix",
    "constraint_function",
    "constraint_values",
    "d_ln_y_dbeta",
    "derivative_cross_check",
    "dot",
    "equilibrium_bracket",
    "evaluate_y",
    "flow_derivatives",
    "gauss_laguerre_rule",
    "init_state",
    "integrate_laguerre",
    "invariant_energy",
    "kinetic_moments",
    "lj_tilde",
    "lj_tilde_gradient",
    "ln_gamma",
    "ln_y",
    "ln_z_canonical",
    "multipliers",
    "newtonian_reference",
    "poisson_bracket",
    "project",
    "simulate",
    "step",
    "table1_closed_forms",
    "thermo_report",
    "thermo_sweep",
    "total_momentum",
    "transverse_distance_sq",
    "weighting",
    "weighting_derivative",
    "y_nonrel_asymptotic",
    "y_over_m3",
    "y_ultra_relativistic",
]
