"""Minkowski four-vectors with the (+,-,-,-) metric.

Components are always stored contravariant. The array helpers work on the
last axis, so an ``(N, 4)`` array holds the four-vectors of N particles.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DomainError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
METRIC_DIAGONAL = np.array([1.0, -1.0, -1.0, -1.0])

VelocityLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True)
class FourVector:
    """Contravariant four-vector (t, x, y, z) in natural units."""

    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "FourVector":
        t, x, y, z = (float(v) for v in values)
        return cls(t, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def lower(self) -> np.ndarray:
        """Covariant components a_mu."""
        return METRIC_DIAGONAL * self.to_array()

    def norm_sq(self) -> float:
        return dot(self, self)

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector.from_array(self.to_array() - other.to_array())

    def __mul__(self, factor: float) -> "FourVector":
        return FourVector.from_array(self.to_array() * factor)

    __rmul__ = __mul__

    def __neg__(self) -> "FourVector":
        return self * -1.0


def _as_array(a: Union[FourVector, np.ndarray, Sequence[float]]) -> np.ndarray:
    if isinstance(a, FourVector):
        return a.to_array()
    return np.asarray(a, dtype=float)


def dot(a: Union[FourVector, np.ndarray], b: Union[FourVector, np.ndarray]) -> float:
    """a^mu b_mu = a.t b.t - a.x b.x - a.y b.y - a.z b.z."""
    return float(minkowski_dot(_as_array(a), _as_array(b)))


def minkowski_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised contraction over the last axis."""
    return a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]


def lower(a: np.ndarray) -> np.ndarray:
    """Apply the metric to contravariant components (last axis)."""
    return np.asarray(a, dtype=float) * METRIC_DIAGONAL


def gamma_factor(velocity: VelocityLike) -> float:
    v = np.asarray(velocity, dtype=float)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise DomainError(f"boost speed must be below 1, got |v|={np.sqrt(v2):.6g}")
    return 1.0 / np.sqrt(1.0 - v2)


def boost_matrix(velocity: VelocityLike) -> np.ndarray:
    """Pure Lorentz boost taking a body at rest to the given velocity."""
    v = np.asarray(velocity, dtype=float).reshape(3)
    gamma = gamma_factor(v)
    v2 = float(v @ v)
    matrix = np.eye(4)
    if v2 == 0.0:
        return matrix
    matrix[0, 0] = gamma
    matrix[0, 1:] = gamma * v
    matrix[1:, 0] = gamma * v
    matrix[1:, 1:] += (gamma - 1.0) * np.outer(v, v) / v2
    return matrix


def boost(a: Union[FourVector, np.ndarray], velocity: VelocityLike) -> Union[FourVector, np.ndarray]:
    """Boost a four-vector (or an array of them along the last axis).

    ``boost(FourVector(m), (0.6, 0, 0))`` gives ``(1.25 m, 0.75 m, 0, 0)``.
    Raises DomainError for |v| >= 1.
    """
    matrix = boost_matrix(velocity)
    if isinstance(a, FourVector):
        return FourVector.from_array(matrix @ a.to_array())
    return np.asarray(a, dtype=float) @ matrix.T


def add_velocities(u: float, v: float) -> float:
    """Relativistic addition of two collinear speeds."""
    if abs(u) >= 1.0 or abs(v) >= 1.0:
        raise DomainError("speeds must be below 1")
    return (u + v) / (1.0 + u * v)
