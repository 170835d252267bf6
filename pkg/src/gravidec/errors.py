"""Exception types shared across the package.

Two families matter to callers: configuration/domain problems (bad inputs)
and numerical problems (a computation could not deliver its contract). The
CLI maps them to distinct exit codes.
"""

from __future__ import annotations


class GravidecError(Exception):
    """Base class for all package errors."""


class DomainError(GravidecError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """The requested point is a genuine singularity of the formula."""


class UnsupportedStateError(DomainError):
    """The operation has no closed form for this graviton state."""


class MissingBetaError(DomainError):
    """An inverse temperature is required but the state does not define one."""


class NoLongTimeDecoherenceError(DomainError):
    """Long-time decoherence needs internal degrees of freedom (eta > 0)."""


class ConfigError(GravidecError, ValueError):
    """A run configuration is malformed or inconsistent."""


class NumericalError(GravidecError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class NonConvergenceError(NumericalError):
    """An iterative or adaptive procedure did not reach its tolerance."""


class ConditioningError(NumericalError):
    """A covariance matrix could not be regularized to positive definiteness."""


class NumericalConsistencyError(NumericalError):
    """A quantity that must vanish analytically did not vanish numerically."""


class SaturationError(NumericalError):
    """The decoherence function levels off below one inside the search horizon.

    Attributes:
        gamma_sat: closed-form saturation value for the state.
        gamma_observed: value of the decoherence function at the horizon end.
    """

    def __init__(self, message: str, gamma_sat: float, gamma_observed: float):
        super().__init__(message)
        self.gamma_sat = gamma_sat
        self.gamma_observed = gamma_observed
