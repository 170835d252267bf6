"""Quantum Brownian motion reference suite with an Ohmic Lorentz-Drude bath.

Independent of the graviton pipeline: the bath cutoff here (``cutoff``) is a
frequency of the oscillator bath and has nothing to do with the graviton
cutoff Lambda. Units: frequencies in rad/s, beta = hbar / k_B T in seconds.

Kernels:
    D(tau) = int_0^inf J(w) sin(w tau) dw
    N(tau) = (1/2) int_0^inf J(w) coth(w beta / 2) cos(w tau) dw
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import oracle
from .errors import DomainError

TAU_CUT = 40.0


class RegimeWarning(UserWarning):
    """The bath cutoff is not well above the system frequency."""


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic bath with Lorentz-Drude cutoff.

    Attributes:
        gamma0: coupling [1/s].
        cutoff: bath cutoff frequency [rad/s].
        mass: system mass M [kg].
        beta: hbar / (k_B T) [s].
        Omega: system frequency [rad/s].
    """

    gamma0: float
    cutoff: float
    mass: float
    beta: float
    Omega: float

    def __post_init__(self) -> None:
        for name in ("gamma0", "cutoff", "mass", "beta"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and > 0")
        if not (self.Omega >= 0.0 and math.isfinite(self.Omega)):
            raise DomainError("Omega must be finite and >= 0")
        if self.regime_warning:
            warnings.warn(f"cutoff/Omega = {self.cutoff / self.Omega:.3g} < 10: the bath is not "
                          "fast compared with the system", RegimeWarning, stacklevel=2)

    @property
    def regime_warning(self) -> bool:
        return self.Omega > 0.0 and self.cutoff / self.Omega < 10.0


def spectral_density(bath: OhmicBath, omega):
    """J(w) = (4 M gamma0 / pi) w cutoff^2 / (cutoff^2 + w^2)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise DomainError("omega must be >= 0")
    lam = bath.cutoff
    out = 4.0 * bath.mass * bath.gamma0 / math.pi * w * lam**2 / (lam**2 + w**2)
    return float(out) if out.ndim == 0 else out


def ld_kernels(bath: OhmicBath, tau):
    """Closed forms (D, N_highT): D = 2 M g0 L^2 e^{-L tau}, N = 2 M g0 (L/beta) e^{-L tau}."""
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("tau must be >= 0")
    lam = bath.cutoff
    e = np.exp(-lam * t)
    d = 2.0 * bath.mass * bath.gamma0 * lam**2 * e
    n = 2.0 * bath.mass * bath.gamma0 * lam / bath.beta * e
    if t.ndim == 0:
        return float(d), float(n)
    return d, n


def exact_noise_kernel(bath: OhmicBath, tau, n_terms: int = 20000):
    """N(tau) at any temperature from the Matsubara expansion of coth.

    N = M g0 L^2 cot(beta L / 2) e^{-L tau}
        + (4 M g0 L^2 / beta) [ -(beta/2pi) ln(1 - e^{-2 pi tau/beta})
                                + sum_n L^2 e^{-nu_n tau} / (nu_n (nu_n^2 - L^2)) ]
    with nu_n = 2 pi n / beta. Log-divergent at tau = 0.
    """
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(t < 0.0):
        raise DomainError("tau must be >= 0")
    lam, beta = bath.cutoff, bath.beta
    half = 0.5 * beta * lam
    if abs(math.sin(half)) < 1e-8:
        raise DomainError("beta * cutoff is a multiple of 2 pi; the Matsubara split is singular there")
    mg = bath.mass * bath.gamma0
    nu = 2.0 * math.pi / beta * np.arange(1, n_terms + 1)
    coef = lam**2 / (nu * (nu**2 - lam**2))
    with np.errstate(divide="ignore"):
        log_term = -(beta / (2.0 * math.pi)) * np.log(-np.expm1(-2.0 * math.pi * t / beta))
    remainder = np.exp(-np.outer(t, nu)) @ coef
    # Tail n > n_terms, where nu >> cutoff: sum e^{-c n} / n^3 ~ e^{-c K'} / (2 K'^2).
    k_mid = n_terms + 0.5
    remainder += lam**2 * (beta / (2.0 * math.pi)) ** 3 * np.exp(-2.0 * math.pi * t * k_mid / beta) / (2.0 * k_mid**2)
    out = mg * lam**2 / math.tan(half) * np.exp(-lam * t) + 4.0 * mg * lam**2 / beta * (log_term + remainder)
    return float(out[0]) if np.ndim(tau) == 0 else out


def caldeira_leggett_coefficients(bath: OhmicBath) -> tuple[float, float, float, float]:
    """Markovian coefficients (dOmega2, gamma, sigma2, Sigma2) in closed form."""
    lam, om, g0 = bath.cutoff, bath.Omega, bath.gamma0
    den = lam**2 + om**2
    d_omega2 = -2.0 * g0 * lam**3 / den
    gamma = g0 * lam**2 / den
    sigma2 = 2.0 * bath.mass * g0 / bath.beta * lam**2 / den
    big_sigma2 = -2.0 * g0 / bath.beta * lam / den
    return d_omega2, gamma, sigma2, big_sigma2


def _tau_integral(f, upper: float) -> float:
    return oracle.adaptive_quad(f, 0.0, upper, 1e-13, relative=True, max_intervals=20000).value


def caldeira_leggett_integrals(bath: OhmicBath) -> tuple[float, float, float, float]:
    """The same coefficients from their defining tau-integrals by quadrature.

    Uses the closed-form high-temperature kernels, integrated on
    [0, TAU_CUT / cutoff]. At Omega = 0 the sine integrals are replaced by
    their limits (sin(W tau)/W -> tau).
    """
    upper = TAU_CUT / bath.cutoff
    om, m = bath.Omega, bath.mass
    D = lambda t: ld_kernels(bath, t)[0]  # noqa: E731
    N = lambda t: ld_kernels(bath, t)[1]  # noqa: E731
    if om > 0.0:
        sin_over = lambda t: np.sin(om * t) / om  # noqa: E731
    else:
        sin_over = lambda t: np.asarray(t, dtype=float)  # noqa: E731
    d_omega2 = -_tau_integral(lambda t: D(t) * np.cos(om * t), upper) / m
    gamma = _tau_integral(lambda t: D(t) * sin_over(t), upper) / (2.0 * m)
    sigma2 = _tau_integral(lambda t: N(t) * np.cos(om * t), upper)
    big_sigma2 = -_tau_integral(lambda t: N(t) * sin_over(t), upper) / m
    return d_omega2, gamma, sigma2, big_sigma2


def dissipation_sine_transform(bath: OhmicBath, omega: float) -> float:
    """(2/pi) int_0^inf D(tau) sin(omega tau) dtau by quadrature; equals J(omega)."""
    upper = TAU_CUT / bath.cutoff
    return 2.0 / math.pi * _tau_integral(lambda t: ld_kernels(bath, t)[0] * np.sin(omega * t), upper)


def noise_cosine_transform(bath: OhmicBath, omega: float) -> float:
    """(2/pi) int_0^inf N(tau) cos(omega tau) dtau with the exact thermal kernel."""
    nu1 = 2.0 * math.pi / bath.beta
    upper = TAU_CUT / min(bath.cutoff, nu1)
    # tau = upper s^3 turns the log singularity at tau = 0 into s^2 ln s.
    def integrand(s):
        s = np.asarray(s, dtype=float)
        t = upper * s**3
        return 3.0 * upper * s**2 * exact_noise_kernel(bath, np.maximum(t, 1e-300)) * np.cos(omega * t)

    n_panels = int(min(2000, omega * upper / math.pi)) + 1
    points = list(np.cbrt(np.linspace(0.0, 1.0, n_panels + 1)[1:-1]))
    res = oracle.adaptive_quad(integrand, 0.0, 1.0, 1e-12, relative=True, points=points, max_intervals=20000)
    return 2.0 / math.pi * res.value


def fdt_check(bath: OhmicBath, omega: float) -> float:
    """Relative residual of N_C(w) = (1/2) D_S(w) coth(w beta / 2), both sides by quadrature."""
    if not omega > 0.0:
        raise DomainError("omega must be > 0")
    lhs = noise_cosine_transform(bath, omega)
    rhs = 0.5 * dissipation_sine_transform(bath, omega) / math.tanh(0.5 * omega * bath.beta)
    return abs(lhs - rhs) / abs(rhs)
