"""Grid sweeps shared by the command line and the explorer app.

Each builder returns a pandas DataFrame in grid order plus a metadata dict
that ends up in the JSON sidecar.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .config import BOLTZMANN_MEV_PER_K, CONVERGENCE_TOLERANCE, pressure_to_mev_fm3
from .dynamics import Trajectory
from .errors import DomainError
from .partition import ApproachKind, GasSpec, Method, YResult, default_rule, evaluate_y
from .specfun import QuadratureRule, gauss_laguerre_rule
from .thermo import table1_closed_forms, thermo_report, thermo_sweep
from .utils import ordered_map

logger = logging.getLogger(__name__)

ULTRA_RELATIVISTIC_BETA_M = 1e-4
COMPARISON_ORDER = 60
FIGURE1_COLUMNS = ["beta_m", "y_full", "y_semi", "y_juttner", "y_nonrel"]
THERMO_COLUMNS = ["T_kelvin", "beta_m", "approach", "F", "S", "P", "P_mev_fm3", "E_avg", "c_V", "y_over_m3"]
TRAJECTORY_COLUMNS = [
    "tau",
    "particle_id",
    "q0",
    "q1",
    "q2",
    "q3",
    "p0",
    "p1",
    "p2",
    "p3",
    "phi_residual",
    "chi_residual",
]


@dataclass
class TableResult:
    frame: pd.DataFrame
    metadata: Dict = field(default_factory=dict)


def _parse_approaches(approaches: Optional[Iterable[Union[ApproachKind, str]]]) -> List[ApproachKind]:
    if approaches is None:
        return list(ApproachKind)
    parsed = []
    for approach in approaches:
        kind = ApproachKind.parse(approach)
        if kind not in parsed:
            parsed.append(kind)
    if not parsed:
        raise DomainError("at least one approach is required")
    # figure columns keep their canonical order
    return [kind for kind in ApproachKind if kind in parsed]


def order_comparison(
    grid: Sequence[float], kinds: Sequence[ApproachKind], rule: QuadratureRule, workers: int = 1
) -> Dict[str, float]:
    """Largest relative gap between quadrature at rule.order and at COMPARISON_ORDER, per approach."""
    reference_rule = gauss_laguerre_rule(COMPARISON_ORDER)

    def gaps(b: float) -> List[float]:
        out = []
        for kind in kinds:
            value = evaluate_y(kind, b, rule, "quadrature", check_convergence=False).value
            reference = evaluate_y(kind, b, reference_rule, "quadrature", check_convergence=False).value
            out.append(abs(value - reference) / abs(reference))
        return out

    rows = ordered_map(gaps, list(grid), workers)
    return {kind.value: max(row[column] for row in rows) for column, kind in enumerate(kinds)}


def figure1_table(
    grid: Sequence[float],
    approaches: Optional[Iterable[Union[ApproachKind, str]]] = None,
    rule: Optional[QuadratureRule] = None,
    method: Method = "auto",
    workers: int = 1,
) -> TableResult:
    """Y/m^3 of every selected approach on a beta*m grid."""
    kinds = _parse_approaches(approaches)
    rule = default_rule(rule)
    grid = [float(b) for b in grid]
    if not grid:
        raise DomainError("the beta_m grid is empty")

    def row(b: float) -> List[YResult]:
        return [evaluate_y(kind, b, rule, method) for kind in kinds]

    results = ordered_map(row, grid, workers)
    frame = pd.DataFrame({"beta_m": grid})
    for column, kind in enumerate(kinds):
        frame[kind.column] = [cells[column].value for cells in results]

    convergence = {}
    notes = []
    for column, kind in enumerate(kinds):
        cells = [cells[column] for cells in results]
        convergence[kind.value] = {
            "method": cells[0].method,
            "converged": all(cell.converged for cell in cells),
            "max_relative_change": max(cell.relative_change for cell in cells),
            "reference_order": next((cell.reference_order for cell in cells if cell.reference_order), None),
        }
        notes.extend(cell.warning for cell in cells if cell.warning)

    metadata = {
        "quadrature_order": rule.order,
        "convergence_tolerance": CONVERGENCE_TOLERANCE,
        "method": method,
        "points": len(grid),
        "convergence": convergence,
        "order_comparison": {
            "orders": [rule.order, COMPARISON_ORDER],
            "max_relative_difference": order_comparison(grid, kinds, rule, workers),
        },
        "warnings": notes,
    }
    logger.debug("figure1 table: %d rows, %d approaches", len(grid), len(kinds))
    return TableResult(frame=frame, metadata=metadata)


def _ratios(report, temperature: float) -> Dict[str, float]:
    n = report.n_particles
    return {
        "avg_energy_over_NkT": report.avg_energy / (n * temperature),
        "specific_heat_over_Nk": report.specific_heat / n,
    }


def table1_summary(
    gas: GasSpec,
    temperature: float,
    rule: Optional[QuadratureRule] = None,
    limit_beta_m: float = ULTRA_RELATIVISTIC_BETA_M,
) -> Dict[str, Dict]:
    """Ultra-relativistic rows at ``temperature`` and the numeric limit check.

    The check runs the full thermodynamics at beta*m = ``limit_beta_m`` with
    the rest mass removed and compares <E>/NkT and c_V/Nk to the closed forms.
    """
    rule = default_rule(rule)
    limit_temperature = gas.mass / limit_beta_m
    summary = {}
    for kind in (ApproachKind.FULL_COVARIANT, ApproachKind.SEMI_COVARIANT, ApproachKind.JUTTNER):
        closed = table1_closed_forms(kind, gas, temperature)
        closed_limit = _ratios(table1_closed_forms(kind, gas, limit_temperature), limit_temperature)
        numeric = thermo_report(gas, kind, limit_temperature, rule, subtract_rest_mass=True)
        numeric_limit = _ratios(numeric, limit_temperature)
        deviation = {
            key: abs(numeric_limit[key] - closed_limit[key]) / abs(closed_limit[key]) for key in closed_limit
        }
        summary[kind.value] = {
            "closed_form": {
                "free_energy": closed.free_energy,
                "entropy": closed.entropy,
                "pressure": closed.pressure,
                "avg_energy": closed.avg_energy,
                "specific_heat": closed.specific_heat,
                **_ratios(closed, temperature),
            },
            "numeric_at_limit": {"beta_m": limit_beta_m, **numeric_limit},
            "relative_deviation": deviation,
            "warnings": list(numeric.warnings),
        }
    return summary


def thermo_table(
    gas: GasSpec,
    approaches: Optional[Iterable[Union[ApproachKind, str]]],
    temperatures_kelvin: Sequence[float],
    rule: Optional[QuadratureRule] = None,
    subtract_rest_mass: bool = False,
    workers: int = 1,
) -> TableResult:
    """Thermodynamic rows for every (temperature, approach), temperature-major."""
    kinds = _parse_approaches(approaches)
    rule = default_rule(rule)
    temperatures = [BOLTZMANN_MEV_PER_K * float(t) for t in temperatures_kelvin]
    reports = thermo_sweep(gas, kinds, temperatures, rule, subtract_rest_mass, workers)

    rows = []
    for index, report in enumerate(reports):
        row = {"T_kelvin": float(temperatures_kelvin[index // len(kinds)])}
        row.update(report.to_row())
        row["P_mev_fm3"] = pressure_to_mev_fm3(report.pressure)
        rows.append(row)
    frame = pd.DataFrame(rows, columns=THERMO_COLUMNS)
    metadata = {
        "quadrature_order": rule.order,
        "n_particles": gas.n_particles,
        "mass_mev": gas.mass,
        "volume_mev-3": gas.volume,
        "subtract_rest_mass": subtract_rest_mass,
        "warnings": [note for report in reports for note in report.warnings],
    }
    return TableResult(frame=frame, metadata=metadata)


def trajectory_table(trajectory: Trajectory) -> pd.DataFrame:
    return pd.DataFrame(list(trajectory.rows()), columns=TRAJECTORY_COLUMNS)


def ordering_holds(frame: pd.DataFrame, upto_beta_m: float = 0.1) -> bool:
    """Y_juttner > Y_semi > Y_full on every row with beta*m <= ``upto_beta_m``."""
    low = frame[frame["beta_m"] <= upto_beta_m]
    return bool(np.all(low["y_juttner"] > low["y_semi"]) and np.all(low["y_semi"] > low["y_full"]))
