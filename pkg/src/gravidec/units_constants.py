"""Physical constants, Planck quantities and SI <-> internal conversions.

All shape functions are evaluated in the dimensionless time x = Lambda t / hbar.
Everything else is kept in SI and converted here, at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Union

from .errors import DomainError

# CODATA 2018 exact/recommended values, frozen for reproducibility.
_HBAR = 1.054571817e-34
_C = 299792458.0
_G = 6.67430e-11
_K_B = 1.380649e-23


@dataclass(frozen=True)
class Constants:
    """Frozen table of the constants used throughout the package (SI)."""

    hbar: float = _HBAR
    c: float = _C
    G: float = _G
    k_B: float = _K_B
    planck_length: float = math.sqrt(_HBAR * _G / _C**3)
    planck_time: float = math.sqrt(_HBAR * _G / _C**5)
    planck_mass: float = math.sqrt(_HBAR * _C / _G)
    planck_energy: float = math.sqrt(_HBAR * _C**5 / _G)
    planck_temperature: float = math.sqrt(_HBAR * _C**5 / _G) / _K_B
    euler_gamma: float = 0.57721566490153286
    zeta3: float = 1.2020569031595943


CONSTANTS = Constants()

HBAR = CONSTANTS.hbar
C = CONSTANTS.c
G = CONSTANTS.G
K_B = CONSTANTS.k_B
L_P = CONSTANTS.planck_length
T_P = CONSTANTS.planck_time
M_P = CONSTANTS.planck_mass
E_P = CONSTANTS.planck_energy
TEMP_P = CONSTANTS.planck_temperature
EULER_GAMMA = CONSTANTS.euler_gamma
ZETA3 = CONSTANTS.zeta3

# Default Newtonian source: the Earth.
EARTH_MASS = 5.9722e24
EARTH_RADIUS = 6.371e6


@dataclass(frozen=True, kw_only=True)
class PhysicalParams:
    """Particle and environment parameters in SI units.

    Attributes:
        m: particle mass [kg].
        v: path speed [m/s], must be below c.
        L0: detector size [m]; sets the graviton cutoff Lambda = hbar c / L0.
        Xi: mean path [m]; defaults to L0.
        eta: internal coupling (dimensionless, >= 0; 0 switches internal DoFs off).
        T_int: internal temperature [K].
        M_N: Newtonian source mass [kg].
        R_N: Newtonian source radius [m].
    """

    m: float
    v: float
    L0: float
    Xi: Optional[float] = None
    eta: float = 0.0
    T_int: float = 300.0
    M_N: float = EARTH_MASS
    R_N: float = EARTH_RADIUS

    def __post_init__(self) -> None:
        if self.Xi is None:
            object.__setattr__(self, "Xi", self.L0)
        for name in ("m", "v", "L0", "Xi", "T_int", "M_N", "R_N"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        if not (self.eta >= 0.0 and math.isfinite(self.eta)):
            raise DomainError(f"eta must be finite and non-negative, got {self.eta!r}")
        if self.v >= C:
            raise DomainError(f"v must be below c, got {self.v!r}")

    @property
    def Lambda(self) -> float:
        """Graviton cutoff energy [J]."""
        return cutoff_energy(self)

    @property
    def tidal_rate(self) -> float:
        """G M_N / R_N^3 [s^-2]."""
        return G * self.M_N / self.R_N**3

    @property
    def phi_zz(self) -> float:
        """zz component of the tidal tensor, 2 G M_N / R_N^3 [s^-2]."""
        return 2.0 * self.tidal_rate

    def replace(self, **changes) -> "PhysicalParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        if "L0" in changes and "Xi" not in changes and self.Xi == self.L0:
            values["Xi"] = None
        values.update(changes)
        return PhysicalParams(**values)


@dataclass(frozen=True)
class InternalParams:
    """Dimensionless (Planck-unit) image of PhysicalParams."""

    m: float
    v: float
    L0: float
    Xi: float
    eta: float
    T_int: float
    M_N: float
    R_N: float


def cutoff_energy(p: Union[PhysicalParams, float]) -> float:
    """Graviton energy cutoff Lambda = hbar c / L0 [J].

    Accepts a PhysicalParams or a bare detector size in metres.
    """
    L0 = p.L0 if isinstance(p, PhysicalParams) else float(p)
    if not L0 > 0.0:
        raise DomainError(f"detector size L0 must be positive, got {L0!r}")
    return HBAR * C / L0


def dimensionless_time(t, Lambda: float):
    """x = Lambda t / hbar. Works elementwise on arrays."""
    return Lambda * t / HBAR


def to_internal(p: PhysicalParams) -> InternalParams:
    """Express parameters in Planck units (hbar = c = G = k_B = 1)."""
    return InternalParams(
        m=p.m / M_P,
        v=p.v / C,
        L0=p.L0 / L_P,
        Xi=p.Xi / L_P,
        eta=p.eta,
        T_int=p.T_int / TEMP_P,
        M_N=p.M_N / M_P,
        R_N=p.R_N / L_P,
    )


def from_internal(q: InternalParams) -> PhysicalParams:
    """Inverse of to_internal."""
    return PhysicalParams(
        m=q.m * M_P,
        v=q.v * C,
        L0=q.L0 * L_P,
        Xi=q.Xi * L_P,
        eta=q.eta,
        T_int=q.T_int * TEMP_P,
        M_N=q.M_N * M_P,
        R_N=q.R_N * L_P,
    )
