"""Constrained Hamiltonian evolution in the global parameter tau.

The Dirac Hamiltonian H = sum_a lambda_a psi_a is built from the on-shell
constraints (perfect gas) or from all but the last constraint (real gas).
The multipliers follow from the bracket matrix C, the flow is integrated with
classical RK4 and every step ends with a Newton projection of (p^0, q^0)
back onto the constraint manifold.
"""

import logging
import math
import time
import warnings
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .config import RESIDUAL_TOLERANCE
from .constraints import (
    ConstraintSystem,
    GasModel,
    LennardJonesParams,
    ModelKind,
    SystemState,
    bracket_from_gradients,
    constraint_system,
    invariant_energy,
    lj_tilde,
)
from .errors import (
    DomainError,
    DynamicsError,
    InitializationError,
    NearSingularWarning,
    ProjectionError,
    SingularMatrixError,
    StepError,
)
from .minkowski import METRIC_DIAGONAL, boost

logger = logging.getLogger(__name__)

CONDITION_WARNING = 1e12
PROJECTION_MAX_ITERATIONS = 20
PLACEMENT_ATTEMPTS = 1000
ENERGY_FIXED_POINT_ITERATIONS = 100


@dataclass(frozen=True, eq=False)
class BracketMatrix:
    matrix: np.ndarray
    condition_number: float


def _bracket_matrix(system: ConstraintSystem) -> np.ndarray:
    """{psi_a, psi_b} for every pair of constraints."""
    g_dp = system.dp * METRIC_DIAGONAL
    g_dq = system.dq * METRIC_DIAGONAL
    return np.einsum("aiu,biu->ab", g_dp, system.dq) - np.einsum("aiu,biu->ab", g_dq, system.dp)


def _condition(matrix: np.ndarray) -> float:
    try:
        condition = float(np.linalg.cond(matrix))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"bracket matrix is singular: {exc}") from exc
    if not math.isfinite(condition):
        raise SingularMatrixError("bracket matrix is singular")
    if condition > CONDITION_WARNING:
        warnings.warn(f"bracket matrix condition number {condition:.3e}", NearSingularWarning, stacklevel=3)
    return condition


def _c_matrix(model: GasModel, system: ConstraintSystem) -> BracketMatrix:
    full = _bracket_matrix(system)
    n = system.n
    matrix = full if model.is_real else full[:n, n:]
    return BracketMatrix(matrix=matrix, condition_number=_condition(matrix))


def c_matrix(model: GasModel, state: SystemState) -> BracketMatrix:
    """C_ij = {phi_i, chi_j} (N x N), or {psi_i, psi_j} (2N x 2N) for the real gas."""
    return _c_matrix(model, constraint_system(model, state))


def _solve_multipliers(model: GasModel, system: ConstraintSystem) -> np.ndarray:
    bracket = _c_matrix(model, system)
    size = bracket.matrix.shape[0]
    if model.is_real:
        # consistency d psi_b / d tau = 0 with d chi_N / d tau = -1
        rhs = np.zeros(size)
        rhs[-1] = 1.0
    else:
        rhs = np.ones(size)
    try:
        solution = np.linalg.solve(bracket.matrix.T, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"cannot solve for the multipliers: {exc}") from exc
    return solution[:-1] if model.is_real else solution


def multipliers(model: GasModel, state: SystemState) -> np.ndarray:
    """Lagrange multipliers of the Dirac Hamiltonian.

    N values for the perfect gas (one per on-shell constraint), 2N-1 for the
    real gas (the component belonging to chi_N vanishes and is dropped).
    """
    return _solve_multipliers(model, constraint_system(model, state))


def _flow(model: GasModel, state: SystemState) -> Tuple[np.ndarray, np.ndarray]:
    system = constraint_system(model, state)
    lam = _solve_multipliers(model, system)
    rows = slice(0, lam.shape[0])
    dq = METRIC_DIAGONAL * np.einsum("a,aiu->iu", lam, system.dp[rows])
    dp = -METRIC_DIAGONAL * np.einsum("a,aiu->iu", lam, system.dq[rows])
    return dq, dp


def flow_derivatives(model: GasModel, state: SystemState) -> Tuple[np.ndarray, np.ndarray]:
    """(dq/dtau, dp/dtau), each of shape (N, 4), with contravariant components."""
    return _flow(model, state)


def project(
    model: GasModel,
    state: SystemState,
    tolerance: float = RESIDUAL_TOLERANCE,
    max_iterations: int = PROJECTION_MAX_ITERATIONS,
) -> SystemState:
    """Newton on (p_i^0, q_i^0) until every residual is below ``tolerance``.

    Spatial components are never touched.
    """
    system = constraint_system(model, state)
    residual = float(np.max(np.abs(system.values)))
    if not math.isfinite(residual):
        raise ProjectionError("non-finite constraint residuals", [residual])
    if residual <= tolerance:
        return state

    n = state.n
    q = np.array(state.q)
    p = np.array(state.p)
    trace = [residual]
    for iteration in range(max_iterations):
        jacobian = np.concatenate([system.dp[:, :, 0], system.dq[:, :, 0]], axis=1)
        try:
            delta = np.linalg.solve(jacobian, -system.values)
        except np.linalg.LinAlgError as exc:
            raise ProjectionError(f"singular projection Jacobian: {exc}", trace) from exc
        p[:, 0] += delta[:n]
        q[:, 0] += delta[n:]
        if not (p[:, 0] > 0.0).all():
            raise ProjectionError("projection produced a non-positive energy", trace)
        state = state.replace(q=q, p=p)
        system = constraint_system(model, state)
        residual = float(np.max(np.abs(system.values)))
        trace.append(residual)
        if residual <= tolerance:
            logger.debug("projection converged in %d iterations (residual %.2e)", iteration + 1, residual)
            return state
        if not math.isfinite(residual):
            break
    raise ProjectionError(f"no convergence in {max_iterations} iterations", trace)


def _advance(state: SystemState, dq: np.ndarray, dp: np.ndarray, h: float) -> SystemState:
    return state.replace(q=state.q + h * dq, p=state.p + h * dp, tau=state.tau + h)


def step(model: GasModel, state: SystemState, dtau: float, index: int = 0) -> SystemState:
    """One RK4 step of the Dirac flow followed by projection; tau advances by dtau.

    ``index`` only labels a StepError raised from a failed projection.
    """
    if not dtau > 0.0 or not math.isfinite(dtau):
        raise DomainError(f"dtau must be positive, got {dtau!r}")
    k1 = _flow(model, state)
    k2 = _flow(model, _advance(state, *k1, 0.5 * dtau))
    k3 = _flow(model, _advance(state, *k2, 0.5 * dtau))
    k4 = _flow(model, _advance(state, *k3, dtau))
    dq = (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
    dp = (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
    moved = _advance(state, dq, dp, dtau)
    try:
        return project(model, moved)
    except ProjectionError as exc:
        raise StepError(str(exc), step_index=index, residuals=exc.residual_trace) from exc


def _sample_positions(
    rng: np.random.Generator, n: int, box: float, min_separation: Optional[float]
) -> np.ndarray:
    if min_separation is None:
        return rng.uniform(0.0, box, size=(n, 3))
    for _ in range(PLACEMENT_ATTEMPTS):
        positions = rng.uniform(0.0, box, size=(n, 3))
        gaps = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=-1)
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() >= min_separation:
            return positions
    raise InitializationError(f"could not place {n} particles at separation >= {min_separation} in a box of {box}")


def _real_gas_energies(model: GasModel, q: np.ndarray, p: np.ndarray, masses: np.ndarray, tau0: float) -> np.ndarray:
    """Fixed point p_i^0 = sqrt(m_i^2 + |p_i|^2 + sum_j V~_ij)."""
    n = q.shape[0]
    free = masses**2 + np.sum(p[:, 1:] ** 2, axis=1)
    energies = np.sqrt(free)
    for iteration in range(ENERGY_FIXED_POINT_ITERATIONS):
        p[:, 0] = energies
        state = SystemState(q=q, p=p, masses=masses, tau=tau0)
        potential = np.array([sum(lj_tilde(i, j, state, model.lj) for j in range(n) if j != i) for i in range(n)])
        shell = free + potential
        if not (shell > 0.0).all():
            raise InitializationError("pair potential exceeds the rest energy, no on-shell energy exists")
        updated = np.sqrt(shell)
        if np.max(np.abs(updated - energies)) <= 1e-14 * np.max(updated):
            logger.debug("on-shell energies settled after %d fixed-point iterations", iteration + 1)
            return updated
        energies = updated
    raise InitializationError("on-shell energy fixed point did not converge")


def init_state(
    model: GasModel,
    n: int,
    seed: int,
    box: float = 10.0,
    momentum_scale: float = 0.1,
    tau0: float = 0.0,
    mass: float = 1.0,
) -> SystemState:
    """A constraint-satisfying state at tau = tau0, reproducible from ``seed``.

    Positions are uniform in a cube of side ``box`` (real-gas particles keep at
    least sigma apart), spatial momenta Gaussian with width ``momentum_scale``.
    """
    if not isinstance(n, (int, np.integer)) or n < model.min_particles:
        raise DomainError(f"{model.kind.value} model needs n >= {model.min_particles}, got {n!r}")
    for name, value in (("box", box), ("momentum_scale", momentum_scale), ("mass", mass)):
        if not value > 0.0 or not math.isfinite(value):
            raise DomainError(f"{name} must be positive, got {value!r}")

    rng = np.random.default_rng(seed)
    min_separation = model.lj.sigma if model.is_real else None
    positions = _sample_positions(rng, n, box, min_separation)
    spatial_p = rng.normal(0.0, momentum_scale, size=(n, 3))
    masses = np.full(n, float(mass))

    q = np.zeros((n, 4))
    p = np.zeros((n, 4))
    q[:, 1:] = positions
    p[:, 1:] = spatial_p
    q[:, 0] = tau0

    if not model.is_real:
        p[:, 0] = np.sqrt(masses**2 + np.sum(spatial_p**2, axis=1))
        if model.kind is ModelKind.PERFECT_COVARIANT:
            q[:, 0] = (masses * tau0 + np.sum(spatial_p * positions, axis=1)) / p[:, 0]
        return SystemState(q=q, p=p, masses=masses, tau=tau0)

    try:
        p[:, 0] = _real_gas_energies(model, q, p, masses, tau0)
        state = SystemState(q=q, p=p, masses=masses, tau=tau0)
        return project(model, state, max_iterations=4 * PROJECTION_MAX_ITERATIONS)
    except InitializationError:
        raise
    except DynamicsError as exc:
        raise InitializationError(f"real-gas initial state failed: {exc}") from exc


def total_momentum(state: SystemState) -> np.ndarray:
    return state.p.sum(axis=0)


def boost_state(state: SystemState, velocity: Sequence[float]) -> SystemState:
    """Boost every q_i and p_i; tau is a scalar and stays."""
    return state.replace(q=boost(state.q, velocity), p=boost(state.p, velocity))


def equilibrium_bracket(model: GasModel, state: SystemState, u: Optional[Sequence[float]] = None) -> float:
    """sum_a lambda_a {U.P, psi_a} over the constraints in the Dirac Hamiltonian."""
    system = constraint_system(model, state)
    lam = _solve_multipliers(model, system)
    energy_gradient = invariant_energy(u).gradient(state)
    return float(
        sum(lam[a] * bracket_from_gradients(energy_gradient, (system.dq[a], system.dp[a])) for a in range(lam.shape[0]))
    )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded frames of one run plus residual and conservation diagnostics."""

    model: GasModel
    dtau: float
    frames: Tuple[SystemState, ...]
    phi_residuals: np.ndarray
    chi_residuals: np.ndarray
    max_phi_residual: float
    max_chi_residual: float
    momentum_drift: np.ndarray
    wall_time: float
    steps: int

    @property
    def taus(self) -> np.ndarray:
        return np.array([frame.tau for frame in self.frames])

    @property
    def max_residual(self) -> float:
        return max(self.max_phi_residual, self.max_chi_residual)

    @property
    def final(self) -> SystemState:
        return self.frames[-1]

    def rows(self) -> Iterator[Dict[str, float]]:
        for frame, phi, chi in zip(self.frames, self.phi_residuals, self.chi_residuals):
            for index in range(frame.n):
                row = {"tau": frame.tau, "particle_id": index}
                row.update({f"q{mu}": frame.q[index, mu] for mu in range(4)})
                row.update({f"p{mu}": frame.p[index, mu] for mu in range(4)})
                row["phi_residual"] = phi[index]
                row["chi_residual"] = chi[index]
                yield row

    def summary(self) -> Dict:
        return {
            "model": self.model.kind.value,
            "steps": self.steps,
            "dtau": self.dtau,
            "n_particles": self.frames[0].n,
            "max_phi_residual": self.max_phi_residual,
            "max_chi_residual": self.max_chi_residual,
            "momentum_drift": [float(v) for v in self.momentum_drift],
            "wall_time_s": self.wall_time,
        }


def simulate(
    model: GasModel,
    state: SystemState,
    dtau: float,
    steps: int,
    record_every: int = 1,
    progress: bool = False,
) -> Trajectory:
    """Integrate ``steps`` RK4+projection steps, recording every ``record_every``-th frame."""
    if not isinstance(steps, (int, np.integer)) or steps < 0:
        raise DomainError(f"steps must be a non-negative integer, got {steps!r}")
    if record_every < 1:
        raise DomainError(f"record_every must be >= 1, got {record_every!r}")

    started = time.perf_counter()
    n = state.n
    initial_p = total_momentum(state)
    scale = abs(initial_p[0])
    residuals = constraint_system(model, state).values

    frames: List[SystemState] = [state]
    recorded = [residuals]
    max_phi = float(np.max(np.abs(residuals[:n])))
    max_chi = float(np.max(np.abs(residuals[n:])))
    drift = np.zeros(4)

    for index in tqdm(range(1, steps + 1), desc="simulate", disable=not progress, leave=False):
        try:
            state = step(model, state, dtau, index=index)
            residuals = constraint_system(model, state).values
        except StepError:
            raise
        except DynamicsError as exc:
            raise StepError(str(exc), step_index=index, residuals=list(np.abs(residuals))) from exc

        max_phi = max(max_phi, float(np.max(np.abs(residuals[:n]))))
        max_chi = max(max_chi, float(np.max(np.abs(residuals[n:]))))
        drift = np.maximum(drift, np.abs(total_momentum(state) - initial_p) / scale)
        if index % record_every == 0 or index == steps:
            frames.append(state)
            recorded.append(residuals)

    recorded = np.array(recorded)
    return Trajectory(
        model=model,
        dtau=float(dtau),
        frames=tuple(frames),
        phi_residuals=recorded[:, :n],
        chi_residuals=recorded[:, n:],
        max_phi_residual=max_phi,
        max_chi_residual=max_chi,
        momentum_drift=drift,
        wall_time=time.perf_counter() - started,
        steps=int(steps),
    )


@dataclass(frozen=True, eq=False)
class NewtonianPath:
    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray


def _newtonian_rates(
    x: np.ndarray, p: np.ndarray, masses: np.ndarray, params: LennardJonesParams
) -> Tuple[np.ndarray, np.ndarray]:
    # each pair enters H twice, once from either on-shell constraint
    force = np.zeros_like(x)
    n = x.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            r_vec = x[i] - x[j]
            r = float(np.linalg.norm(r_vec))
            s6 = (params.sigma / r) ** 6
            dv_dr = params.kappa * (-12.0 * s6 * s6 + 6.0 * s6) / r
            f = -2.0 * dv_dr * r_vec / r
            force[i] += f
            force[j] -= f
    return p / masses[:, None], force


def newtonian_reference(
    positions: np.ndarray,
    momenta: np.ndarray,
    masses: np.ndarray,
    params: LennardJonesParams,
    dt: float,
    steps: int,
) -> NewtonianPath:
    """RK4 for H = sum p^2/2m + sum_i sum_{j != i} kappa[(sigma/r)^12 - (sigma/r)^6]."""
    x = np.array(positions, dtype=float)
    p = np.array(momenta, dtype=float)
    masses = np.asarray(masses, dtype=float)
    xs = [x.copy()]
    ps = [p.copy()]
    for _ in range(steps):
        k1 = _newtonian_rates(x, p, masses, params)
        k2 = _newtonian_rates(x + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1], masses, params)
        k3 = _newtonian_rates(x + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1], masses, params)
        k4 = _newtonian_rates(x + dt * k3[0], p + dt * k3[1], masses, params)
        x = x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        p = p + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        xs.append(x.copy())
        ps.append(p.copy())
    return NewtonianPath(times=dt * np.arange(steps + 1), positions=np.array(xs), momenta=np.array(ps))
