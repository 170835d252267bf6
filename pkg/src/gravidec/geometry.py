"""Polarization tensors, angular and tidal tensors, and graviton scattering.

Indices run 1..3 in the public API (z is axis 3); arrays are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .units_constants import C, EARTH_MASS, EARTH_RADIUS, G

SUN_MASS = 1.989e30
SUN_RADIUS = 6.957e8
NEUTRON_STAR_MASS = 1.4 * SUN_MASS
NEUTRON_STAR_RADIUS = 1.03e4

#: Named Newtonian sources, (mass [kg], radius [m]).
SOURCES = {
    "earth": (EARTH_MASS, EARTH_RADIUS),
    "sun": (SUN_MASS, SUN_RADIUS),
    "neutron_star": (NEUTRON_STAR_MASS, NEUTRON_STAR_RADIUS),
}


@dataclass(frozen=True)
class PolarizationPair:
    """Plus and cross polarization tensors for propagation direction khat."""

    eps_plus: np.ndarray
    eps_cross: np.ndarray
    khat: np.ndarray


@dataclass(frozen=True)
class TidalTensor:
    """Tidal tensor of a point source on the +z axis [s^-2]."""

    phi: np.ndarray

    @property
    def phi_zz(self) -> float:
        return float(self.phi[2, 2])


def _transverse_basis(khat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Seed with the coordinate axis least aligned with khat; ties go to the
    # lowest index so that khat = z gives (x, y).
    axis = int(np.argmin(np.abs(khat)))
    seed = np.zeros(3)
    seed[axis] = 1.0
    e1 = seed - np.dot(seed, khat) * khat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return e1, e2


def polarization_tensors(khat) -> PolarizationPair:
    """Transverse-traceless polarization pair for a unit wave vector."""
    k = np.asarray(khat, dtype=float).reshape(3)
    norm = float(np.linalg.norm(k))
    if not abs(norm - 1.0) <= 1e-9:
        raise DomainError(f"khat must be a unit vector, |khat| = {norm}")
    k = k / norm
    e1, e2 = _transverse_basis(k)
    plus = np.outer(e1, e1) - np.outer(e2, e2)
    cross = np.outer(e1, e2) + np.outer(e2, e1)
    return PolarizationPair(eps_plus=plus, eps_cross=cross, khat=k)


def _check_index(*idx: int) -> None:
    for i in idx:
        if i not in (1, 2, 3):
            raise DomainError(f"tensor indices run over 1..3, got {i!r}")


def angular_tensor(i: int, j: int, k: int, l: int) -> float:
    """Solid-angle integral of sum_s eps_s^{ij} eps_s^{kl}."""
    _check_index(i, j, k, l)
    d = lambda a, b: 1.0 if a == b else 0.0  # noqa: E731
    return 8.0 * math.pi / 15.0 * (3.0 * (d(i, k) * d(j, l) + d(i, l) * d(j, k)) - 2.0 * d(i, j) * d(k, l))


def angular_tensor_array() -> np.ndarray:
    """All 81 components of angular_tensor as a (3, 3, 3, 3) array."""
    out = np.empty((3, 3, 3, 3))
    for idx in np.ndindex(3, 3, 3, 3):
        out[idx] = angular_tensor(*(n + 1 for n in idx))
    return out


def tidal_tensor(M_N: float, R_N: float) -> TidalTensor:
    """Phi_ij = (G M_N / R_N^3)(3 delta_i3 delta_j3 - delta_ij)."""
    if not (M_N > 0.0 and R_N > 0.0):
        raise DomainError("source mass and radius must be positive")
    rate = G * M_N / R_N**3
    phi = -rate * np.eye(3)
    phi[2, 2] = 2.0 * rate
    return TidalTensor(phi=phi)


def polarization_sum(theta):
    """Sum over polarizations of the squared scattering amplitude factor."""
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0.0) or np.any(th > math.pi):
        raise DomainError("theta must lie in [0, pi]")
    c = np.cos(th)
    out = (1.0 + c**2) ** 2 + 4.0 * c**2
    return float(out) if np.ndim(theta) == 0 else out


def diff_cross_section(theta, M_N: float):
    """Unpolarized differential cross section dsigma/dOmega [m^2]."""
    th = np.asarray(theta, dtype=float)
    if np.any(th <= 0.0):
        raise SingularityError("the cross section diverges at theta = 0")
    if np.any(th > math.pi):
        raise DomainError("theta must lie in (0, pi]")
    if not M_N > 0.0:
        raise DomainError("source mass must be positive")
    h = 0.5 * th
    s, c = np.sin(h), np.cos(h)
    out = (G * M_N / C**2) ** 2 * (c**8 + s**8) / s**4
    return float(out) if np.ndim(theta) == 0 else out
