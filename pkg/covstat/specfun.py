"""Special functions and quadrature used by the partition integrals.

Gauss-Laguerre rules, the modified Bessel functions K0, K1, K2 from their
cosh integral representation, and a Lanczos log-Gamma.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, EvaluationError, UnderflowWarning

logger = logging.getLogger(__name__)

MAX_LAGUERRE_ORDER = 128
NEWTON_TOLERANCE = 1e-14
NEWTON_MAX_ITERATIONS = 100

# e^{-x} K_n(x) drops below the smallest normal double just past this point
BESSEL_UNDERFLOW_X = 700.0
_BESSEL_TAIL_EXPONENT = 40.0
_BESSEL_PANELS = 48
_LEGENDRE_POINTS = 20

_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre nodes and weights for the weight e^{-x} on (0, inf)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def _laguerre_pair(n: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return (L_n(x), L_{n-1}(x)) by the three-term recurrence."""
    current = np.ones_like(x)
    previous = np.zeros_like(x)
    for j in range(n):
        current, previous = ((2 * j + 1 - x) * current - j * previous) / (j + 1), current
    return current, previous


@lru_cache(maxsize=None, typed=True)
def gauss_laguerre_rule(order: int) -> QuadratureRule:
    """Nodes are the roots of L_order, weights the Christoffel numbers.

    The eigenvalues of the Laguerre Jacobi matrix seed a Newton iteration on
    L_order itself, so the roots are polished against the polynomial rather
    than taken from the eigensolver.
    """
    if isinstance(order, bool) or not isinstance(order, (int, np.integer)):
        raise DomainError(f"quadrature order must be an integer, got {order!r}")
    order = int(order)
    if not 1 <= order <= MAX_LAGUERRE_ORDER:
        raise DomainError(f"quadrature order must lie in [1, {MAX_LAGUERRE_ORDER}], got {order}")

    diagonal = 2.0 * np.arange(order) + 1.0
    off_diagonal = np.arange(1.0, order)
    nodes = eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)

    active = np.ones(order, dtype=bool)
    iterations = 0
    for iterations in range(1, NEWTON_MAX_ITERATIONS + 1):
        x = nodes[active]
        ln, ln_minus = _laguerre_pair(order, x)
        derivative = order * (ln - ln_minus) / x
        delta = ln / derivative
        nodes[active] = x - delta
        done = np.abs(delta) <= NEWTON_TOLERANCE * np.maximum(1.0, np.abs(x))
        active[np.flatnonzero(active)[done]] = False
        if not active.any():
            break
    logger.debug("Laguerre order %d: Newton settled after %d iterations", order, iterations)

    nodes = np.sort(nodes)
    l_next, _ = _laguerre_pair(order + 1, nodes)
    weights = nodes / ((order + 1) * l_next) ** 2

    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=order, nodes=nodes, weights=weights)


def integrate_laguerre(f: Callable, rule: QuadratureRule) -> float:
    """Approximate the integral of e^{-x} f(x) over (0, inf) as sum w_i f(x_i)."""
    try:
        values = np.asarray(f(rule.nodes), dtype=float)
    except TypeError:
        values = None
    if values is None or values.shape != rule.nodes.shape:
        values = np.array([float(f(float(x))) for x in rule.nodes])

    bad = ~np.isfinite(values)
    if bad.any():
        node = float(rule.nodes[np.argmax(bad)])
        raise EvaluationError("integrand is not finite", node=node)
    return rule.integrate(values)


@lru_cache(maxsize=32)
def _legendre(points: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(points)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_legendre(edges: Sequence[float], points: int = _LEGENDRE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """Panel Gauss-Legendre nodes and weights over consecutive edges."""
    edges = np.asarray(edges, dtype=float)
    base_nodes, base_weights = _legendre(points)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * base_nodes[None, :]).ravel()
    weights = (half[:, None] * base_weights[None, :]).ravel()
    return nodes, weights


def _check_bessel_args(n: int, x: float) -> float:
    if n not in (0, 1, 2):
        raise DomainError(f"Bessel order must be 0, 1 or 2, got {n!r}")
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"Bessel argument must be positive and finite, got {x!r}")
    return x


def _bessel_cutoff(n: int, x: float) -> float:
    """Smallest xi with x (cosh xi - 1) - n xi above the tail exponent."""
    xi = math.acosh(1.0 + _BESSEL_TAIL_EXPONENT / x)
    for _ in range(8):
        xi = math.acosh(1.0 + (_BESSEL_TAIL_EXPONENT + n * xi) / x)
    return xi


def bessel_k_scaled(n: int, x: float) -> float:
    """e^x K_n(x) from the integral of e^{-x (cosh xi - 1)} cosh(n xi) over xi > 0."""
    x = _check_bessel_args(n, x)
    xi_max = _bessel_cutoff(n, x)
    nodes, weights = composite_legendre(np.linspace(0.0, xi_max, _BESSEL_PANELS + 1))
    # cosh(xi) - 1 written as 2 sinh^2(xi/2) to keep small xi exact
    excess = 2.0 * np.sinh(0.5 * nodes) ** 2
    integrand = np.exp(-x * excess) * np.cosh(n * nodes)
    return float(np.dot(weights, integrand))


def bessel_k(n: int, x: float) -> float:
    """Modified Bessel function K_n(x) for n in {0, 1, 2}.

    Beyond BESSEL_UNDERFLOW_X the result underflows; zero is returned and an
    UnderflowWarning is issued. Use bessel_k_scaled there.
    """
    x = _check_bessel_args(n, x)
    if x > BESSEL_UNDERFLOW_X:
        warnings.warn(f"K_{n}({x:g}) underflows, returning 0", UnderflowWarning, stacklevel=2)
        return 0.0
    return math.exp(-x) * bessel_k_scaled(n, x)


def bessel_k_asymptotic(n: int, x: float, terms: int = 2) -> float:
    """Large-x expansion sqrt(pi/2x) e^{-x} (1 + (4n^2-1)/(8x) + ...)."""
    x = _check_bessel_args(n, x)
    mu = 4.0 * n * n
    term = 1.0
    total = 1.0
    for k in range(1, terms):
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total += term
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total


def ln_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0 (Lanczos, g=7, with reflection below 1/2)."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"ln_gamma needs a positive finite argument, got {x!r}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - ln_gamma(1.0 - x)

    z = x - 1.0
    series = _LANCZOS_COEFFICIENTS[0]
    for k in range(1, len(_LANCZOS_COEFFICIENTS)):
        series += _LANCZOS_COEFFICIENTS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)
