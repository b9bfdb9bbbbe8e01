"""Exception and warning types raised across covstat."""

from typing import Optional, Sequence


class CovstatError(Exception):
    """Base class for every error raised by covstat."""


class DomainError(CovstatError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(CovstatError):
    """Bad configuration value, species name or command-line combination."""


class EvaluationError(CovstatError):
    """An integrand returned a non-finite value at a quadrature node."""

    def __init__(self, message: str, node: float):
        super().__init__(f"{message} (node x={node!r})")
        self.node = node


class AccuracyError(CovstatError):
    """Two independent numerical methods disagree beyond the hard limit."""


class ContractViolationError(CovstatError):
    """A phase function was used in a bracket without an analytic gradient."""


class DynamicsError(CovstatError):
    """Base class for failures of the constrained dynamics engine."""


class DegeneratePairError(DynamicsError):
    """The pair momentum p_ij is null, so the transverse projector is undefined."""


class CausalityError(DynamicsError):
    """The transverse separation is not spacelike (q_T^2 >= 0)."""


class OverflowGuardError(DynamicsError):
    """Two particles came closer than the hard floor of the pair potential."""


class SingularWeightError(DynamicsError):
    """The weighting function is singular (q_ij^2 = 0) or e^y overflows."""


class SingularMatrixError(DynamicsError):
    """The bracket matrix C cannot be inverted."""


class ProjectionError(DynamicsError):
    """Newton projection onto the constraint manifold did not converge."""

    def __init__(self, message: str, residual_trace: Sequence[float]):
        trace = ", ".join(f"{r:.3e}" for r in residual_trace)
        super().__init__(f"{message}; residual trace [{trace}]")
        self.residual_trace = list(residual_trace)


class StepError(DynamicsError):
    """A trajectory step failed; carries the step index and last residuals."""

    def __init__(self, message: str, step_index: int, residuals: Optional[Sequence[float]] = None):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index
        self.residuals = list(residuals) if residuals is not None else []


class InitializationError(DynamicsError):
    """No constraint-satisfying initial state could be constructed."""


class CovstatWarning(UserWarning):
    """Base class for soft numerical problems."""


class QuadratureWarning(CovstatWarning):
    """Doubling the quadrature order changed the result by more than the tolerance."""


class UnderflowWarning(CovstatWarning):
    """A Bessel function underflowed to zero."""


class NearSingularWarning(CovstatWarning):
    """The bracket matrix is badly conditioned."""


class DerivativeWarning(CovstatWarning):
    """Moment quadrature and finite differences disagree more than expected."""
