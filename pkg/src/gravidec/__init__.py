"""Graviton-induced decoherence of a massive object in free fall.

Submodules: units_constants, oracle, special_functions, geometry,
noise_kernels, decoherence, langevin_entropy, qbm_validation, cli.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConditioningError,
    ConfigError,
    DomainError,
    GravidecError,
    MissingBetaError,
    NoLongTimeDecoherenceError,
    NonConvergenceError,
    NumericalConsistencyError,
    NumericalError,
    SaturationError,
    SingularityError,
    UnsupportedStateError,
)
from .noise_kernels import GravitonState, graviton_noise  # noqa: E402
from .special_functions import StateTag  # noqa: E402
from .units_constants import CONSTANTS, PhysicalParams  # noqa: E402

__all__ = [
    "__version__",
    "CONSTANTS",
    "PhysicalParams",
    "GravitonState",
    "StateTag",
    "graviton_noise",
    "GravidecError",
    "DomainError",
    "SingularityError",
    "UnsupportedStateError",
    "MissingBetaError",
    "NoLongTimeDecoherenceError",
    "ConfigError",
    "NumericalError",
    "NonConvergenceError",
    "ConditioningError",
    "NumericalConsistencyError",
    "SaturationError",
]
