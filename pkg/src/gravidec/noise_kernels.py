"""Graviton noise kernel N_g(t, t') (zz component) for the four bath states.

Units: SI throughout, with frequencies in rad/s. The cutoff enters as
Lambda/hbar [s^-1], the noise temperature as k_B T_g / hbar [s^-1] and the
tidal component Phi_zz = 2 G M_N / R_N^3 [s^-2]; N_g is returned in s^-6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import oracle
from .errors import ConditioningError, DomainError
from .special_functions import F_n, F_thermal, StateTag, as_tag
from .units_constants import HBAR, K_B, T_P, PhysicalParams

#: Mode normalization of the graviton Hadamard function.
M_G = math.pi**2 / 2.0
#: Upper limit of the thermal frequency integral in units of k_B T_g / hbar.
THERMAL_OMEGA_CUT = 60.0


@dataclass(frozen=True)
class GravitonState:
    """Initial state of the graviton bath.

    Build with the class constructors: ``GravitonState.vacuum()``,
    ``.thermal(T_g)``, ``.coherent(alpha)``, ``.squeezed(r)``.
    """

    tag: StateTag
    T_g: Optional[float] = None
    alpha: Optional[float] = None
    r: Optional[float] = None

    def __post_init__(self) -> None:
        tag = as_tag(self.tag)
        object.__setattr__(self, "tag", tag)
        needs = {StateTag.thermal: "T_g", StateTag.coherent: "alpha", StateTag.squeezed: "r"}.get(tag)
        for name in ("T_g", "alpha", "r"):
            value = getattr(self, name)
            if name == needs:
                if value is None or not math.isfinite(value):
                    raise DomainError(f"{tag.value} state needs a finite {name}")
            elif value is not None:
                raise DomainError(f"{name} is not a parameter of the {tag.value} state")
        if tag is StateTag.thermal and not self.T_g > 0.0:
            raise DomainError("thermal state needs T_g > 0")
        if tag is StateTag.coherent and self.alpha < 0.0:
            raise DomainError("coherent amplitude alpha must be >= 0")

    @classmethod
    def vacuum(cls) -> "GravitonState":
        return cls(StateTag.vacuum)

    @classmethod
    def thermal(cls, T_g: float) -> "GravitonState":
        return cls(StateTag.thermal, T_g=float(T_g))

    @classmethod
    def coherent(cls, alpha: float) -> "GravitonState":
        return cls(StateTag.coherent, alpha=float(alpha))

    @classmethod
    def squeezed(cls, r: float) -> "GravitonState":
        return cls(StateTag.squeezed, r=float(r))

    @property
    def theta(self) -> float:
        """Thermal frequency k_B T_g / hbar [s^-1]."""
        if self.tag is not StateTag.thermal:
            raise DomainError("only the thermal state has a temperature")
        return K_B * self.T_g / HBAR

    def as_dict(self) -> dict:
        out = {"tag": self.tag.value}
        for name in ("T_g", "alpha", "r"):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out


def hadamard(state: GravitonState, omega, t, tp):
    """Hadamard function G_omega(t, t') of a single graviton mode."""
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0.0)):
        raise DomainError("hadamard needs omega > 0")
    t = np.asarray(t, dtype=float)
    tp = np.asarray(tp, dtype=float)
    vac = np.cos(w * (t - tp)) / (M_G * w)
    tag = state.tag
    if tag is StateTag.vacuum:
        out = vac
    elif tag is StateTag.thermal:
        out = vac + 2.0 / (M_G * w) * np.cos(w * (t - tp)) / np.expm1(w / state.theta)
    elif tag is StateTag.coherent:
        out = vac + state.alpha**2 / (M_G * w) * np.cos(w * t) * np.cos(w * tp)
    else:
        out = math.cosh(2 * state.r) * vac - math.sinh(2 * state.r) / (M_G * w) * np.cos(w * (t + tp))
    return float(out) if out.ndim == 0 else out


def _vac_block(lam: float, phi: float, x):
    return 2.0 * lam**4 / (15.0 * math.pi) * (lam**2 * F_n(5, x) - 2.0 * phi * F_n(3, x))


def graviton_noise(state: GravitonState, params: PhysicalParams, t, tp):
    """Closed-form N_g(t, t') [s^-6]; broadcasts over t and t'."""
    t = np.asarray(t, dtype=float)
    tp = np.asarray(tp, dtype=float)
    if np.any(t < 0.0) or np.any(tp < 0.0):
        raise DomainError("times must be >= 0")
    lam = params.Lambda / HBAR
    phi = params.phi_zz
    delta = np.abs(t - tp)
    total = t + tp
    vac = _vac_block(lam, phi, lam * delta)
    tag = state.tag
    if tag is StateTag.vacuum:
        out = vac
    elif tag is StateTag.thermal:
        th = math.pi * state.theta
        out = vac + 8.0 * th**4 / (5.0 * math.pi) * (
            10.0 * th**2 * F_thermal(1, th * delta) - phi * F_thermal(2, th * delta))
    elif tag is StateTag.coherent:
        a2 = state.alpha**2
        out = vac + 0.5 * a2 * (_vac_block(lam, phi, lam * total) + vac)
    else:
        r2 = 2.0 * state.r
        out = math.cosh(r2) * vac - math.sinh(r2) * _vac_block(lam, phi, lam * total)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def graviton_noise_coincident(state: GravitonState, params: PhysicalParams, t):
    """Coincidence limit N_g(t) = N_g(t, t) [s^-6]."""
    return graviton_noise(state, params, t, t)


def internal_noise_strength(eta: float, T_int: float) -> float:
    """White-noise coefficient eta pi k_B T_int / hbar [s^-1] of the internal bath."""
    if not eta >= 0.0:
        raise DomainError("eta must be >= 0")
    if not T_int > 0.0:
        raise DomainError("T_int must be > 0")
    return eta * math.pi * K_B * T_int / HBAR


def oracle_noise(state: GravitonState, params: PhysicalParams, t: float, tp: float,
                 tol: float = 1e-12) -> float:
    """N_g(t, t') by direct frequency quadrature of the Hadamard function.

    N_g = (pi/15) int omega^4 (omega^2 - 2 Phi_zz) G_omega(t, t') domega, with
    the cutoff applied to the vacuum-like part and the thermal excess
    integrated to THERMAL_OMEGA_CUT k_B T_g / hbar. Independent of the closed
    forms: only ``hadamard`` and the oracle quadrature are used.
    """
    lam = params.Lambda / HBAR
    phi = params.phi_zz
    fmax = max(abs(t - tp), t + tp, 1e-300)

    def panels(upper: float) -> list[float]:
        n = int(min(upper * fmax / math.pi, 20000))
        return list(np.linspace(0.0, upper, n + 2)[1:-1]) if n > 0 else []

    def integrand(st: GravitonState, scale: float):
        def f(u):
            w = scale * np.maximum(u, 1e-300)
            return scale * (math.pi / 15.0) * w**4 * (w**2 - 2.0 * phi) * hadamard(st, w, t, tp)
        return f

    base_state = GravitonState.vacuum() if state.tag is StateTag.thermal else state
    main = oracle.adaptive_quad(integrand(base_state, lam), 0.0, 1.0, tol, relative=True,
                                points=[p / lam for p in panels(lam)], max_intervals=200000)
    value = main.value
    if state.tag is StateTag.thermal:
        th = state.theta
        top = THERMAL_OMEGA_CUT * th

        def excess(u):
            w = top * np.maximum(u, 1e-300)
            return top * (math.pi / 15.0) * w**4 * (w**2 - 2.0 * phi) * (
                2.0 / (M_G * w) * np.cos(w * (t - tp)) / np.expm1(w / th))

        extra = oracle.adaptive_quad(excess, 0.0, 1.0, tol, relative=True,
                                     points=[p / top for p in panels(top)], max_intervals=200000)
        value += extra.value
    return float(value)


@dataclass(frozen=True)
class KernelGrid:
    """Discretized Gaussian model of the stochastic tidal field.

    ``cov`` holds N_g(t_i, t_j) [s^-6]; the field covariance used for sampling
    is ``noise_scale * cov`` (default t_P^2, which converts the kernel to
    s^-4, the square of a tidal rate). ``mean`` follows the convention
    <N> = -Phi_zz/2; the Langevin module flips the sign.
    """

    times: np.ndarray
    mean: np.ndarray
    cov: np.ndarray
    state: GravitonState
    jitter: float = 0.0
    noise_scale: float = T_P**2
    chol: Optional[np.ndarray] = field(default=None, repr=False)

    def with_noise_scale(self, noise_scale: float) -> "KernelGrid":
        if not noise_scale >= 0.0:
            raise DomainError("noise_scale must be >= 0")
        return KernelGrid(self.times, self.mean, self.cov, self.state, self.jitter, noise_scale, self.chol)

    @property
    def field_cov(self) -> np.ndarray:
        return self.noise_scale * self.cov


def regularized_cholesky(cov: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of cov plus the diagonal jitter it needed.

    Tries no jitter, then 1e-12 * max(diag), escalating by 10 up to 1e-6 * max(diag).
    """
    cov = np.asarray(cov, dtype=float)
    scale = float(np.max(np.abs(np.diag(cov)))) if cov.size else 0.0
    if scale == 0.0:
        return np.zeros_like(cov), 0.0
    n = cov.shape[0]
    jitters = [0.0] + [scale * 10.0**k for k in range(-12, -5)]
    for jitter in jitters:
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(n)), jitter
        except np.linalg.LinAlgError:
            continue
    raise ConditioningError(
        f"covariance not positive definite even with jitter {1e-6 * scale:.3e} (1e-6 x max diagonal)")


def build_kernel_grid(state: GravitonState, params: PhysicalParams, times) -> KernelGrid:
    """Covariance and mean of the stochastic tidal field on a time grid."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise DomainError("need at least two grid times")
    if np.any(np.diff(times) <= 0.0):
        raise DomainError("grid times must be strictly ascending")
    cov = graviton_noise(state, params, times[:, None], times[None, :])
    cov = 0.5 * (cov + cov.T)
    chol, jitter = regularized_cholesky(cov)
    mean = np.full(times.shape, -0.5 * params.phi_zz)
    return KernelGrid(times=times, mean=mean, cov=cov, state=state, jitter=jitter, chol=chol)
