"""Decoherence functions, decoherence times, saturation and recoherence.

Configuration one: both paths share the mean position Xi and separate along a
triangular profile dxi(t) = 2 v w(t), with w rising for t_f/2 and falling
back to zero. Configuration two: paths with two different constant speeds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import oracle
from .errors import (
    DomainError,
    NoLongTimeDecoherenceError,
    NonConvergenceError,
    SaturationError,
    UnsupportedStateError,
)
from .noise_kernels import GravitonState, graviton_noise
from .special_functions import StateTag, shape_f, shape_g
from .units_constants import C, E_P, HBAR, K_B, M_P, T_P, PhysicalParams


class Config(str, enum.Enum):
    """Path configuration."""

    one = "one"
    two = "two"


@dataclass(frozen=True)
class StateCoefficients:
    """State-dependent constants of the decoherence functions.

    kappa_A = eta pi k_B T_int Lambda_A carries units J^2.
    """

    b_A: float
    Lambda_A: float
    kappa_A: float
    K1: float
    K2: float
    deltaOmega: float
    deltaOmega_t: Optional[float] = None


@dataclass(frozen=True)
class DecoherenceCurve:
    """Sampled decoherence function."""

    times: np.ndarray
    gamma: np.ndarray
    config: Config
    state: GravitonState
    params: PhysicalParams


def _delta_omega(params: PhysicalParams) -> float:
    return 1.0 - 6.0 * (HBAR / params.Lambda) ** 2 * params.tidal_rate


def _delta_omega_thermal(state: GravitonState, params: PhysicalParams) -> float:
    lam_t = math.pi * K_B * state.T_g
    return 1.0 + 6.0 * ((HBAR / params.Lambda) ** 2 - 0.35 * (HBAR / lam_t) ** 2) * params.tidal_rate


def state_coefficients(state: GravitonState, params: PhysicalParams) -> StateCoefficients:
    tag = state.tag
    lam = params.Lambda
    b = math.cosh(2.0 * state.r) if tag is StateTag.squeezed else 1.0
    lam_a = math.pi * K_B * state.T_g if tag is StateTag.thermal else lam
    if tag is StateTag.vacuum:
        k1, k2 = 2.0, 1.0
    elif tag is StateTag.thermal:
        k1, k2 = 4.0 / 3.0, 12.0
    elif tag is StateTag.coherent:
        k1, k2 = state.alpha**2 / 3.0, state.alpha**2
    else:
        s2 = math.sinh(2.0 * state.r)
        k1, k2 = -2.0 / 3.0 * s2, -s2
    return StateCoefficients(
        b_A=b,
        Lambda_A=lam_a,
        kappa_A=params.eta * math.pi * K_B * params.T_int * lam_a,
        K1=k1,
        K2=k2,
        deltaOmega=_delta_omega(params),
        deltaOmega_t=_delta_omega_thermal(state, params) if tag is StateTag.thermal else None,
    )


def _times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(~np.isfinite(t)):
        raise DomainError("times must be finite and >= 0")
    return t


def _out(t, value):
    return float(value) if np.ndim(t) == 0 else value


def _gamma1_part(state: GravitonState, params: PhysicalParams, t: np.ndarray) -> np.ndarray:
    co = state_coefficients(state, params)
    lam = co.Lambda_A / HBAR
    ratio = co.kappa_A / (params.m * C**2) ** 2
    x = lam * t
    pref = 8.0 * params.Xi**2 * params.v**2 * params.m**2 / (5.0 * math.pi * E_P**2)
    graviton = lam**2 * (shape_f(state, "I", x) + ratio * shape_f(state, "II", x))
    tidal = params.tidal_rate * (shape_f(state, "III", x) + ratio * shape_f(state, "IV", x))
    return pref * co.K1 * (graviton - tidal)


def gamma1(state: GravitonState, params: PhysicalParams, t):
    """Closed-form Configuration-one decoherence function Gamma_1(t)."""
    t = _times(t)
    value = _gamma1_part(state, params, t)
    if state.tag is not StateTag.vacuum:
        b = math.cosh(2.0 * state.r) if state.tag is StateTag.squeezed else 1.0
        value = b * _gamma1_part(GravitonState.vacuum(), params, t) + value
    return _out(t, value)


def _gamma2_part(state: GravitonState, params: PhysicalParams, dv2: float, t: np.ndarray) -> np.ndarray:
    co = state_coefficients(state, params)
    lam = co.Lambda_A / HBAR
    ratio = co.kappa_A / (params.m * C**2) ** 2
    x = lam * t
    pref = params.m**2 * dv2**2 / (15.0 * math.pi * E_P**2)
    graviton = shape_g(state, "I", x) + ratio * shape_g(state, "II", x)
    tidal = params.tidal_rate / lam**2 * (shape_g(state, "III", x) + ratio * shape_g(state, "IV", x))
    return pref * co.K2 * (graviton - tidal)


def gamma2(state: GravitonState, params: PhysicalParams, v1: float, v2: float, t):
    """Closed-form Configuration-two decoherence function Gamma_2(t)."""
    t = _times(t)
    for v in (v1, v2):
        if not (0.0 <= abs(v) < C):
            raise DomainError("path speeds must satisfy |v| < c")
    dv2 = v1**2 - v2**2
    internal = (math.pi * params.eta * K_B * params.T_int / (4.0 * HBAR) * dv2**2 / C**4
                * (t / 2.0 + 2.0 / 3.0 * params.tidal_rate * t**3))
    value = _gamma2_part(state, params, dv2, t)
    if state.tag is not StateTag.vacuum:
        b = math.cosh(2.0 * state.r) if state.tag is StateTag.squeezed else 1.0
        value = b * _gamma2_part(GravitonState.vacuum(), params, dv2, t) + value
    return _out(t, internal + value)


def triangular_path(v: float, t_f: float) -> Callable:
    """Configuration-one path separation dxi(t) = 2 v min(t, t_f - t) on [0, t_f]."""
    def dxi(t):
        t = np.asarray(t, dtype=float)
        return 2.0 * v * np.clip(np.minimum(t, t_f - t), 0.0, None)
    return dxi


def gamma1_general(state: GravitonState, params: PhysicalParams, delta_xi: Callable, Xi: float,
                   t_f: float, *, breakpoints=None, tol: float = 1e-9) -> float:
    """Gamma_1(t_f) for an arbitrary separation profile by direct time quadrature.

    Gamma_1 = 2 (m/M_P)^2 (Xi^2/c^4) int int dxi(t) dxi(t') N_g(t, t')
            + 4 eta pi (k_B T_int/hbar) t_P^2 (Xi^2/c^4) int dxi(t)^2 N_g(t, t)

    ``breakpoints`` marks kinks of delta_xi; the default (t_f/2) suits the
    triangular path.
    """
    if not t_f > 0.0:
        raise DomainError("t_f must be > 0")
    bps = (0.5 * t_f,) if breakpoints is None else tuple(breakpoints)

    def kernel(t, tp):
        return graviton_noise(state, params, t, tp)

    double = oracle.nested_time_quad(kernel, (delta_xi, delta_xi), t_f, tol, breakpoints=bps)
    value = 2.0 * (params.m / M_P) ** 2 * Xi**2 / C**4 * double.value
    if params.eta > 0.0:
        def single(t):
            d = np.asarray(delta_xi(t), dtype=float)
            return d * d * graviton_noise(state, params, t, t)
        s = oracle.time_quad(single, t_f, tol, breakpoints=bps)
        value += (4.0 * params.eta * math.pi * K_B * params.T_int / HBAR * T_P**2
                  * Xi**2 / C**4 * s.value)
    return value


def gamma2_general(state: GravitonState, params: PhysicalParams, v1: float, v2: float,
                   t_f: float, *, tol: float = 1e-9) -> float:
    """Gamma_2(t_f) by direct time quadrature of the noise kernel.

    Gamma_2 = (eta pi k_B T_int / 4 hbar)(dv^2/c^4)[t_f/2 + Phi_zz t_f^3/3]
            + eta pi (k_B T_int/hbar) t_P^2 (dv^2/c^4) int t^4 N_g(t, t)
            + (1/2)(m/M_P)^2 (dv^2/c^4) int int (t t')^2 N_g(t, t')
    with dv^2 = (v1^2 - v2^2)^2.
    """
    if not t_f > 0.0:
        raise DomainError("t_f must be > 0")
    dv2 = (v1**2 - v2**2) ** 2
    square = lambda t: np.asarray(t, dtype=float) ** 2  # noqa: E731

    def kernel(t, tp):
        return graviton_noise(state, params, t, tp)

    double = oracle.nested_time_quad(kernel, (square, square), t_f, tol)
    value = 0.5 * (params.m / M_P) ** 2 * dv2 / C**4 * double.value
    if params.eta > 0.0:
        rate = params.eta * math.pi * K_B * params.T_int / HBAR
        value += rate / 4.0 * dv2 / C**4 * (t_f / 2.0 + params.phi_zz * t_f**3 / 3.0)
        single = oracle.time_quad(lambda t: np.asarray(t) ** 4 * graviton_noise(state, params, t, t), t_f, tol)
        value += rate * T_P**2 * dv2 / C**4 * single.value
    return value


def decoherence_curve(state: GravitonState, params: PhysicalParams, times, config="one",
                      v1: Optional[float] = None, v2: float = 0.0) -> DecoherenceCurve:
    """Sample Gamma on a time grid for either configuration."""
    cfg = Config(config)
    t = _times(np.atleast_1d(times))
    if cfg is Config.one:
        gamma = gamma1(state, params, t)
    else:
        gamma = gamma2(state, params, params.v if v1 is None else v1, v2, t)
    gamma = np.asarray(gamma, dtype=float)
    if not np.all(np.isfinite(gamma)):
        raise NonConvergenceError("decoherence function produced non-finite values")
    return DecoherenceCurve(times=t, gamma=gamma, config=cfg, state=state, params=params)


# ---------------------------------------------------------------------------
# Decoherence times
# ---------------------------------------------------------------------------

def _state_factor_short(state: GravitonState, params: PhysicalParams) -> float:
    tag = state.tag
    if tag is StateTag.thermal:
        lam_t = math.pi * K_B * state.T_g
        return (1.0 + 32.0 / 21.0 * _delta_omega_thermal(state, params) * (lam_t / params.Lambda) ** 6) ** -0.25
    if tag is StateTag.coherent:
        return (1.0 + state.alpha**2) ** -0.25
    if tag is StateTag.squeezed:
        # Gamma_s = e^{-2r} Gamma_v at short times, hence a longer time.
        return math.exp(0.5 * state.r)
    return 1.0


def dec_time_short(state: GravitonState, params: PhysicalParams) -> float:
    """Short-time decoherence time from the leading x^4 behavior of Gamma_1 [s]."""
    d_omega = _delta_omega(params)
    if not d_omega > 0.0:
        raise DomainError("tidal term dominates (deltaOmega <= 0): no short-time decoherence")
    t_v = (HBAR / params.Lambda) * math.sqrt(
        math.sqrt(90.0 * math.pi / d_omega) * (C / params.v) * (M_P / params.m) * (params.L0 / params.Xi))
    return t_v * _state_factor_short(state, params)


def dec_time_long(state: GravitonState, params: PhysicalParams) -> float:
    """Long-time decoherence time from the internal-DoF x^3 growth of Gamma_1 [s]."""
    if not params.eta > 0.0:
        raise NoLongTimeDecoherenceError("long-time decoherence needs eta > 0")
    d_omega = _delta_omega(params)
    if not d_omega > 0.0:
        raise DomainError("tidal term dominates (deltaOmega <= 0)")
    lam = params.Lambda
    tau_v = (HBAR / lam) * (135.0 / 4.0 * E_P**2 / (
        d_omega * (params.Xi / params.L0) ** 2 * (params.v / C) ** 2 * params.eta * K_B * params.T_int * lam)) ** (1.0 / 3.0)
    tag = state.tag
    if tag is StateTag.thermal:
        lam_t = math.pi * K_B * state.T_g
        factor = (1.0 + 32.0 / 21.0 * _delta_omega_thermal(state, params) * (lam_t / lam) ** 6) ** (-1.0 / 3.0)
    elif tag is StateTag.coherent:
        factor = (1.0 + 0.5 * state.alpha**2) ** (-1.0 / 3.0)
    elif tag is StateTag.squeezed:
        factor = _cosh_power(2.0 * state.r, -1.0 / 3.0)
    else:
        factor = 1.0
    return tau_v * factor


def _cosh_power(z: float, p: float) -> float:
    # cosh(z)^p without overflow: cosh z = e^|z| (1 + e^{-2|z|}) / 2.
    a = abs(z)
    return math.exp(p * (a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)))


def saturation_value(state: GravitonState, params: PhysicalParams) -> float:
    """Large-time plateau of the graviton-only part of Gamma_1 (eta = 0).

    Vacuum: (16/5pi) deltaOmega (Xi/L0)^2 (v/c)^2 (m/M_P)^2. Other states
    multiply it by the plateau of their f^(I) terms relative to vacuum:
    thermal 1 + (2/3)(Lambda_t/Lambda)^2, coherent 1 + 7 alpha^2/12,
    squeezed cosh 2r - sinh(2r)/6.
    """
    base = (16.0 / (5.0 * math.pi) * _delta_omega(params) * (params.Xi / params.L0) ** 2
            * (params.v / C) ** 2 * (params.m / M_P) ** 2)
    tag = state.tag
    if tag is StateTag.thermal:
        return base * (1.0 + 2.0 / 3.0 * (math.pi * K_B * state.T_g / params.Lambda) ** 2)
    if tag is StateTag.coherent:
        return base * (1.0 + 7.0 * state.alpha**2 / 12.0)
    if tag is StateTag.squeezed:
        return base * (math.cosh(2.0 * state.r) - math.sinh(2.0 * state.r) / 6.0)
    return base


def dec_time_numeric(state: GravitonState, params: PhysicalParams, config="one", *,
                     v1: Optional[float] = None, v2: float = 0.0, n_grid: int = 200,
                     horizon: tuple[float, float] = (1e-3, 1e12), rtol: float = 1e-12,
                     max_extensions: int = 10) -> float:
    """Root of Gamma(t) = 1 by bisection on a logarithmic time grid [s].

    The grid spans horizon * (hbar / Lambda_A). If Gamma already exceeds one
    at the first point the grid is extended downward. If Gamma stays below
    one and is flat to 1e-6 over the last decade, SaturationError is raised
    with the analytic plateau and the observed value; if it is still growing
    the window slides up by six decades, at most ``max_extensions`` times.
    """
    cfg = Config(config)
    lam_a = state_coefficients(state, params).Lambda_A
    unit = HBAR / lam_a
    if cfg is Config.one:
        gam = lambda t: gamma1(state, params, t)  # noqa: E731
    else:
        speed = params.v if v1 is None else v1
        gam = lambda t: gamma2(state, params, speed, v2, t)  # noqa: E731
    lo_exp, hi_exp = math.log10(horizon[0]), math.log10(horizon[1])
    for _ in range(40):
        grid = unit * np.logspace(lo_exp, hi_exp, n_grid)
        values = np.asarray(gam(grid), dtype=float)
        if values[0] < 1.0:
            break
        lo_exp -= 3.0
    else:
        raise NonConvergenceError("Gamma exceeds one at every time probed")
    above = np.nonzero(values >= 1.0)[0]
    extensions = 0
    while above.size == 0:
        last_decade = grid >= grid[-1] / 10.0
        tail = values[last_decade]
        ref = abs(values[-1])
        if ref > 0 and np.max(np.abs(tail - values[-1])) <= 1e-6 * ref:
            raise SaturationError(
                f"Gamma saturates at {values[-1]:.6e} < 1 within the horizon",
                gamma_sat=saturation_value(state, params),
                gamma_observed=float(values[-1]),
            )
        if extensions >= max_extensions or not values[-1] > values[-2]:
            raise NonConvergenceError(
                f"Gamma reached only {np.max(values):.3e} by t = {grid[-1]:.3e} s "
                f"({10.0**hi_exp:.1e} hbar/Lambda_A)")
        # Still growing: slide the window up by six decades.
        lo_exp, hi_exp = hi_exp, hi_exp + 6.0
        grid = unit * np.logspace(lo_exp, hi_exp, n_grid)
        values = np.asarray(gam(grid), dtype=float)
        above = np.nonzero(values >= 1.0)[0]
        extensions += 1
    if above[0] == 0:
        raise NonConvergenceError("lost the bracket while extending the time window")
    i = int(above[0])
    lo, hi = float(grid[i - 1]), float(grid[i])
    # Bisect in log time.
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if gam(mid) >= 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def recoherence_time(state: GravitonState, params: PhysicalParams) -> float:
    """Time after which the tidal term drives Gamma_1 negative (eta = 0) [s].

    Vacuum: (hbar/Lambda) exp[(1/8)(Lambda/hbar)^2 R^3/(G M)], returned as
    +inf when the exponent overflows. Thermal:
    (pi k_B T_g / 4 hbar)(R^3/(G M))[1 + (Lambda / pi k_B T_g)^2].
    """
    if params.eta > 0.0:
        raise DomainError("recoherence thresholds assume no internal DoFs (eta = 0)")
    tag = state.tag
    lam = params.Lambda
    rate = params.tidal_rate
    if tag is StateTag.vacuum:
        if rate == 0.0:
            return math.inf
        exponent = 0.125 * (lam / HBAR) ** 2 / rate
        if exponent > 709.0:
            return math.inf
        return HBAR / lam * math.exp(exponent)
    if tag is StateTag.thermal:
        lam_t = math.pi * K_B * state.T_g
        return lam_t / (4.0 * HBAR) / rate * (1.0 + (lam / lam_t) ** 2)
    raise UnsupportedStateError(f"no closed recoherence threshold for the {tag.value} state")
