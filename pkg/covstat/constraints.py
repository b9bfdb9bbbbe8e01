"""Phase-space state, constraints and Poisson brackets of the N-particle system.

Every constraint psi_a is returned with its analytic gradient with respect
to the contravariant components q_i^mu and p_i^mu. Constraint order is
[phi_1 .. phi_N, chi_1 .. chi_N].
"""

import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    CausalityError,
    ContractViolationError,
    DegeneratePairError,
    DomainError,
    OverflowGuardError,
    SingularWeightError,
)
from .minkowski import METRIC_DIAGONAL, FourVector, minkowski_dot

SEPARATION_FLOOR = 1e-6
# largest y with e^y finite
WEIGHT_EXPONENT_LIMIT = math.log(sys.float_info.max)

Gradient = Tuple[np.ndarray, np.ndarray]


class ModelKind(str, Enum):
    PERFECT_SIMPLE = "simple"
    PERFECT_COVARIANT = "covariant"
    REAL_GAS = "real"

    @classmethod
    def parse(cls, value: Union[str, "ModelKind"]) -> "ModelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "simple": cls.PERFECT_SIMPLE,
            "perfectsimple": cls.PERFECT_SIMPLE,
            "covariant": cls.PERFECT_COVARIANT,
            "perfectcovariant": cls.PERFECT_COVARIANT,
            "real": cls.REAL_GAS,
            "realgas": cls.REAL_GAS,
        }
        if key not in aliases:
            raise DomainError(f"unknown model kind {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class LennardJonesParams:
    kappa: float
    sigma: float

    def __post_init__(self):
        for name in ("kappa", "sigma"):
            value = getattr(self, name)
            if not value > 0.0 or not math.isfinite(value):
                raise DomainError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class GasModel:
    """Constraint family: perfect gas with either time fixation, or the real gas."""

    kind: ModelKind
    lj: Optional[LennardJonesParams] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        if self.kind is ModelKind.REAL_GAS and self.lj is None:
            raise DomainError("the real gas needs Lennard-Jones parameters")
        if self.kind is not ModelKind.REAL_GAS and self.lj is not None:
            raise DomainError("perfect-gas models take no Lennard-Jones parameters")

    @property
    def is_real(self) -> bool:
        return self.kind is ModelKind.REAL_GAS

    @property
    def min_particles(self) -> int:
        return 2 if self.is_real else 1


@dataclass(frozen=True)
class ParticleState:
    q: FourVector
    p: FourVector
    m: float


@dataclass(frozen=True, eq=False)
class SystemState:
    """Positions q (N,4), momenta p (N,4), masses (N,) and the parameter tau."""

    q: np.ndarray
    p: np.ndarray
    masses: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float, copy=True)
        p = np.array(self.p, dtype=float, copy=True)
        masses = np.array(self.masses, dtype=float, copy=True).reshape(-1)
        if q.ndim != 2 or q.shape[1] != 4 or p.shape != q.shape or masses.shape != (q.shape[0],):
            raise DomainError(f"inconsistent state shapes q{q.shape} p{p.shape} m{masses.shape}")
        if q.shape[0] < 1:
            raise DomainError("a state needs at least one particle")
        if not (masses > 0.0).all():
            raise DomainError("all masses must be positive")
        if not (p[:, 0] > 0.0).all():
            raise DomainError("all particles need positive energy p^0")
        for array in (q, p, masses):
            array.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "tau", float(self.tau))

    @classmethod
    def from_particles(cls, particles: Sequence[ParticleState], tau: float = 0.0) -> "SystemState":
        return cls(
            q=[particle.q.to_array() for particle in particles],
            p=[particle.p.to_array() for particle in particles],
            masses=[particle.m for particle in particles],
            tau=tau,
        )

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def particles(self) -> List[ParticleState]:
        return [
            ParticleState(FourVector.from_array(qi), FourVector.from_array(pi), float(mi))
            for qi, pi, mi in zip(self.q, self.p, self.masses)
        ]

    def replace(self, q=None, p=None, tau=None) -> "SystemState":
        return SystemState(
            q=self.q if q is None else q,
            p=self.p if p is None else p,
            masses=self.masses,
            tau=self.tau if tau is None else tau,
        )


@dataclass(frozen=True)
class PhaseFunction:
    """Scalar function on phase space; ``gradient`` returns (d/dq, d/dp), each (N,4)."""

    name: str
    value: Callable[[SystemState], float]
    gradient: Optional[Callable[[SystemState], Gradient]] = None


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Values (2N,) and gradients (2N, N, 4) of all constraints at one state."""

    values: np.ndarray
    dq: np.ndarray
    dp: np.ndarray
    n: int = field(default=0)

    @property
    def phi(self) -> np.ndarray:
        return self.values[: self.n]

    @property
    def chi(self) -> np.ndarray:
        return self.values[self.n :]


def _check_pair(state: SystemState, i: int, j: int) -> None:
    if i == j:
        raise DomainError("pair functions need two distinct particles")
    for index in (i, j):
        if not 0 <= index < state.n:
            raise DomainError(f"particle index {index} out of range for N={state.n}")


def _transverse(q: np.ndarray, pair_p: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """q_T^2 for relative position q and pair momentum P, with d/dq and d/dP."""
    qq = float(minkowski_dot(q, q))
    qp = float(minkowski_dot(q, pair_p))
    pp = float(minkowski_dot(pair_p, pair_p))
    if pp <= 0.0:
        raise DegeneratePairError(f"pair momentum is not timelike (p_ij^2 = {pp:.3e})")
    ratio = qp / pp
    gq = METRIC_DIAGONAL * q
    gp = METRIC_DIAGONAL * pair_p
    value = qq - qp * ratio
    d_q = 2.0 * gq - 2.0 * ratio * gp
    d_p = -2.0 * ratio * gq + 2.0 * ratio * ratio * gp
    return value, d_q, d_p


def _lj_of_transverse(x: float, mass: float, params: LennardJonesParams) -> Tuple[float, float]:
    """V~ and dV~/d(q_T^2) for one transverse separation."""
    if x >= 0.0:
        raise CausalityError(f"transverse separation is not spacelike (q_T^2 = {x:.3e})")
    if math.sqrt(-x) < SEPARATION_FLOOR * params.sigma:
        raise OverflowGuardError(f"pair separation {math.sqrt(-x):.3e} below the hard floor")
    s = -params.sigma**2 / x
    s3 = s**3
    value = 2.0 * mass * params.kappa * (s3 * s3 - s3)
    slope = 2.0 * mass * params.kappa * (6.0 * s**5 - 3.0 * s * s) * params.sigma**2 / (x * x)
    return value, slope


def _exp_weight(y: float) -> float:
    if y > WEIGHT_EXPONENT_LIMIT:
        raise SingularWeightError(
            f"weighting argument q^2/sigma^2 = {y:.4g} exceeds {WEIGHT_EXPONENT_LIMIT:.2f}, e^y overflows"
        )
    return math.exp(y)


def weighting_value(y: float) -> float:
    return _exp_weight(y) / y


def weighting_derivative(y: float) -> float:
    """d/dy of e^y / y."""
    return _exp_weight(y) * (y - 1.0) / (y * y)


def _weight_argument(q: np.ndarray, sigma: float) -> float:
    qq = float(minkowski_dot(q, q))
    if qq == 0.0:
        raise SingularWeightError("lightlike pair separation, the weighting function is singular")
    return qq / sigma**2


def transverse_distance_sq(i: int, j: int, state: SystemState) -> float:
    """Lorentz-invariant q_T^2 = q_ij^2 - (q_ij.p_ij)^2 / p_ij^2."""
    _check_pair(state, i, j)
    value, _, _ = _transverse(state.q[i] - state.q[j], state.p[i] + state.p[j])
    return value


def lj_tilde(i: int, j: int, state: SystemState, params: LennardJonesParams) -> float:
    """2 m_i kappa [(sigma/r_T)^12 - (sigma/r_T)^6] with r_T^2 = -q_T^2."""
    _check_pair(state, i, j)
    x, _, _ = _transverse(state.q[i] - state.q[j], state.p[i] + state.p[j])
    value, _ = _lj_of_transverse(x, state.masses[i], params)
    return value


def lj_tilde_gradient(i: int, j: int, state: SystemState, params: LennardJonesParams) -> dict:
    """Gradients of lj_tilde(i, j) with respect to q_i, q_j, p_i and p_j."""
    _check_pair(state, i, j)
    x, d_q, d_p = _transverse(state.q[i] - state.q[j], state.p[i] + state.p[j])
    _, slope = _lj_of_transverse(x, state.masses[i], params)
    return {"q_i": slope * d_q, "q_j": -slope * d_q, "p_i": slope * d_p, "p_j": slope * d_p}


def weighting(i: int, j: int, state: SystemState, sigma: float) -> float:
    """omega_ij = e^y / y with y = q_ij^2 / sigma^2, sign kept as written."""
    _check_pair(state, i, j)
    return weighting_value(_weight_argument(state.q[i] - state.q[j], sigma))


def _perfect_system(model: GasModel, state: SystemState) -> ConstraintSystem:
    n = state.n
    q, p, m = state.q, state.p, state.masses
    values = np.empty(2 * n)
    dq = np.zeros((2 * n, n, 4))
    dp = np.zeros((2 * n, n, 4))
    p_sq = minkowski_dot(p, p)
    gp = METRIC_DIAGONAL * p
    for i in range(n):
        values[i] = (p_sq[i] - m[i] ** 2) / (2.0 * m[i])
        dp[i, i] = gp[i] / m[i]
        if model.kind is ModelKind.PERFECT_SIMPLE:
            values[n + i] = q[i, 0] - state.tau
            dq[n + i, i, 0] = 1.0
        else:
            values[n + i] = float(minkowski_dot(p[i], q[i])) / m[i] - state.tau
            dq[n + i, i] = gp[i] / m[i]
            dp[n + i, i] = METRIC_DIAGONAL * q[i] / m[i]
    return ConstraintSystem(values=values, dq=dq, dp=dp, n=n)


def _real_gas_system(model: GasModel, state: SystemState) -> ConstraintSystem:
    n = state.n
    if n < 2:
        raise DomainError("the real gas needs at least two particles")
    params = model.lj
    q, p, m = state.q, state.p, state.masses
    values = np.zeros(2 * n)
    dq = np.zeros((2 * n, n, 4))
    dp = np.zeros((2 * n, n, 4))

    p_sq = minkowski_dot(p, p)
    for i in range(n):
        values[i] = (p_sq[i] - m[i] ** 2) / (2.0 * m[i])
        dp[i, i] = METRIC_DIAGONAL * p[i] / m[i]

    sigma_sq = params.sigma**2
    for i in range(n):
        for j in range(i + 1, n):
            q_ij = q[i] - q[j]
            p_ij = p[i] + p[j]
            x, dx_q, dx_p = _transverse(q_ij, p_ij)

            # on-shell rows: phi_i carries -V~_ij / 2 m_i, phi_j carries -V~_ji / 2 m_j
            for a, mass in ((i, m[i]), (j, m[j])):
                v_tilde, slope = _lj_of_transverse(x, mass, params)
                scale = -1.0 / (2.0 * mass)
                values[a] += scale * v_tilde
                dq[a, i] += scale * slope * dx_q
                dq[a, j] -= scale * slope * dx_q
                dp[a, i] += scale * slope * dx_p
                dp[a, j] += scale * slope * dx_p

            # time fixations chi_i, i < N: sum_j omega_ij (p_ij . q_ij) / m_i
            y = _weight_argument(q_ij, params.sigma)
            omega = weighting_value(y)
            d_omega = weighting_derivative(y)
            s = float(minkowski_dot(p_ij, q_ij))
            gq = METRIC_DIAGONAL * q_ij
            gp = METRIC_DIAGONAL * p_ij
            df_q = d_omega * (2.0 * gq / sigma_sq) * s + omega * gp
            df_p = omega * gq
            for a, sign in ((i, 1.0), (j, -1.0)):
                if a == n - 1:
                    continue
                row = n + a
                # q_ji = -q_ij flips the product, omega is even
                values[row] += sign * omega * s / m[a]
                dq[row, i] += sign * df_q / m[a]
                dq[row, j] -= sign * df_q / m[a]
                dp[row, i] += sign * df_p / m[a]
                dp[row, j] += sign * df_p / m[a]

    # chi_N: U.Q - tau with U = P / sqrt(P^2) and Q the mean position
    total_p = p.sum(axis=0)
    mean_q = q.mean(axis=0)
    pp = float(minkowski_dot(total_p, total_p))
    if pp <= 0.0:
        raise DegeneratePairError("total momentum is not timelike")
    norm = math.sqrt(pp)
    pq = float(minkowski_dot(total_p, mean_q))
    values[2 * n - 1] = pq / norm - state.tau
    dq[2 * n - 1, :] = METRIC_DIAGONAL * total_p / (norm * n)
    dp[2 * n - 1, :] = METRIC_DIAGONAL * mean_q / norm - pq / pp**1.5 * METRIC_DIAGONAL * total_p
    return ConstraintSystem(values=values, dq=dq, dp=dp, n=n)


def constraint_system(model: GasModel, state: SystemState) -> ConstraintSystem:
    """All 2N constraint values with their gradients."""
    if state.n < model.min_particles:
        raise DomainError(f"{model.kind.value} model needs at least {model.min_particles} particles")
    if model.is_real:
        return _real_gas_system(model, state)
    return _perfect_system(model, state)


def constraint_values(model: GasModel, state: SystemState) -> np.ndarray:
    """Residuals [phi_1 .. phi_N, chi_1 .. chi_N]."""
    return constraint_system(model, state).values


def constraint_function(model: GasModel, index: int) -> PhaseFunction:
    """One constraint psi_index as a phase function with analytic gradient."""

    def value(state: SystemState) -> float:
        return float(constraint_system(model, state).values[index])

    def gradient(state: SystemState) -> Gradient:
        system = constraint_system(model, state)
        return system.dq[index], system.dp[index]

    return PhaseFunction(name=f"psi_{index}", value=value, gradient=gradient)


def invariant_energy(u: Optional[Sequence[float]] = None) -> PhaseFunction:
    """E = U.P for a fixed unit timelike U (rest frame of the gas by default)."""
    u_vec = np.array([1.0, 0.0, 0.0, 0.0] if u is None else u, dtype=float)
    if float(minkowski_dot(u_vec, u_vec)) <= 0.0 or u_vec[0] <= 0.0:
        raise DomainError("U must be future timelike")
    u_vec = u_vec / math.sqrt(float(minkowski_dot(u_vec, u_vec)))

    def value(state: SystemState) -> float:
        return float(minkowski_dot(u_vec, state.p.sum(axis=0)))

    def gradient(state: SystemState) -> Gradient:
        d_p = np.tile(METRIC_DIAGONAL * u_vec, (state.n, 1))
        return np.zeros_like(state.q), d_p

    return PhaseFunction(name="U.P", value=value, gradient=gradient)


def bracket_from_gradients(grad_a: Gradient, grad_b: Gradient) -> float:
    dq_a, dp_a = grad_a
    dq_b, dp_b = grad_b
    return float(np.sum(METRIC_DIAGONAL * (dp_a * dq_b - dq_a * dp_b)))


def poisson_bracket(a: PhaseFunction, b: PhaseFunction, state: SystemState) -> float:
    """{A, B} = sum_i (dA/dp_i^mu dB/dq_{i mu} - dA/dq_i^mu dB/dp_{i mu})."""
    for function in (a, b):
        if function.gradient is None:
            raise ContractViolationError(f"phase function {function.name!r} has no gradient")
    return bracket_from_gradients(a.gradient(state), b.gradient(state))
