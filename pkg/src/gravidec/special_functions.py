"""Shape functions of the decoherence functions and their building blocks.

Two evaluation routes exist for every shape function:

* ``closed``: the elementary closed form, rewritten where needed to avoid
  overflow (exponentials in e^{-x}) and cancellation (Ci + log combinations
  through Cin(x) = gamma + ln x - Ci(x)).
* ``series``: a power series built from the spectral representation of the
  function, i.e. from the frequency moments of the bath and the exact
  rational time moments of the path weight. It never touches the closed form.

``auto`` uses the series below SERIES_SWITCH and the closed form above. The
closed forms subtract terms of size ~1/x^k, so the switch sits where both
routes still agree to ~1e-12.
"""

from __future__ import annotations

import cmath
import enum
import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import special as sp

from .errors import DomainError, NumericalConsistencyError
from .units_constants import EULER_GAMMA, ZETA3

SERIES_SWITCH = 1.0
_N_TERMS = 40


class StateTag(str, enum.Enum):
    """Initial state of the graviton bath."""

    vacuum = "vacuum"
    thermal = "thermal"
    coherent = "coherent"
    squeezed = "squeezed"


StateLike = Union[StateTag, str]
_WHICH = {"I": 1, "II": 2, "III": 3, "IV": 4, 1: 1, 2: 2, 3: 3, 4: 4}


def as_tag(state) -> StateTag:
    """Coerce a StateTag, its string value, or anything with a ``tag``."""
    if hasattr(state, "tag"):
        state = state.tag
    try:
        return StateTag(state)
    except ValueError as exc:
        raise DomainError(f"unknown graviton state {state!r}") from exc


def _which(which) -> int:
    try:
        return _WHICH[which]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"which must be one of I, II, III, IV, got {which!r}") from exc


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Cosine integral
# ---------------------------------------------------------------------------

def cosint(x):
    """Cosine integral Ci(x) = -int_x^inf cos(t)/t dt for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0.0)):
        raise DomainError("cosint needs x > 0")
    return _scalar_or_array(x, sp.sici(xa)[1])


_CIN_COEF = np.array([(-1.0) ** (k + 1) / (2 * k * math.factorial(2 * k)) for k in range(1, 22)])


def cin(x):
    """Entire cosine integral Cin(x) = int_0^x (1 - cos t)/t dt, x >= 0.

    Equals gamma + ln x - Ci(x) but is free of cancellation near zero.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise DomainError("cin needs x >= 0")
    out = np.empty_like(xa)
    small = xa < 2.0
    y = xa[small] ** 2
    acc = np.zeros_like(y)
    for c in _CIN_COEF[::-1]:
        acc = acc * y + c
    out[small] = acc * y
    big = ~small
    xb = xa[big]
    out[big] = EULER_GAMMA + np.log(xb) - sp.sici(xb)[1]
    return _scalar_or_array(x, out)


# ---------------------------------------------------------------------------
# Kernel functions F_n and thermal F_1^th, F_2^th
# ---------------------------------------------------------------------------

def _fn_series(n: int, x: np.ndarray) -> np.ndarray:
    # (1/x^{n+1}) int_0^x y^n cos y dy = sum_k (-1)^k x^{2k} / ((2k)! (n+2k+1))
    y = x * x
    acc = np.zeros_like(x)
    for k in range(18, -1, -1):
        acc = acc * y + (-1.0) ** k / (math.factorial(2 * k) * (n + 2 * k + 1))
    return acc


def F_n(n: int, x):
    """F_n(x) = x^{-(n+1)} int_0^x y^n cos y dy for n in {3, 5}, x >= 0."""
    if n not in (3, 5):
        raise DomainError(f"F_n defined here for n in {{3, 5}}, got {n}")
    xa = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(xa)
    small = xa < SERIES_SWITCH
    out[small] = _fn_series(n, xa[small])
    xb = xa[~small]
    c, s = np.cos(xb), np.sin(xb)
    if n == 5:
        x2 = xb * xb
        val = ((5 * x2 * x2 - 60 * x2 + 120) * c + xb * (x2 * x2 - 20 * x2 + 120) * s - 120) / xb**6
    else:
        x2 = xb * xb
        val = ((3 * x2 - 6) * c + (x2 * xb - 6 * xb) * s + 6) / xb**4
    out[~small] = val
    return _scalar_or_array(x, out)


@lru_cache(maxsize=None)
def _thermal_kernel_coef(which: int) -> np.ndarray:
    # Expansion of the Bose-weighted cosine transforms in powers of (x/pi)^2.
    zeta = sp.zeta
    coef = []
    for k in range(30):
        if which == 1:
            c = math.factorial(2 * k + 5) * zeta(2 * k + 6) / (math.factorial(2 * k) * 60 * math.pi**6)
        else:
            c = math.factorial(2 * k + 3) * zeta(2 * k + 4) / (math.factorial(2 * k) * 3 * math.pi**4)
        coef.append((-1.0) ** k * c / math.pi ** (2 * k))
    return np.array(coef)


def F_thermal(which: int, x):
    """Thermal kernel functions F_1^th(x) and F_2^th(x) for x >= 0.

    F_1^th = 1/x^6 - (2 cosh^4 x + 11 cosh^2 x + 2) / (15 sinh^6 x)
    F_2^th = (2 cosh^2 x + 1) / (3 sinh^4 x) - 1/x^4
    with limits 2/945 and 1/45 at x = 0.
    """
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    xa = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(xa)
    small = xa < SERIES_SWITCH
    y = xa[small] ** 2
    acc = np.zeros_like(y)
    for c in _thermal_kernel_coef(which)[::-1]:
        acc = acc * y + c
    out[small] = acc
    xb = xa[~small]
    coth = 1.0 / np.tanh(xb)
    csch = 2.0 * np.exp(-xb) / -np.expm1(-2.0 * xb)
    c2, s2 = coth**2, csch**2
    if which == 1:
        out[~small] = 1.0 / xb**6 - (2 * c2 * c2 * s2 + 11 * c2 * s2 * s2 + 2 * s2**3) / 15.0
    else:
        out[~small] = (2 * c2 * s2 + s2 * s2) / 3.0 - 1.0 / xb**4
    return _scalar_or_array(x, out)


# ---------------------------------------------------------------------------
# Polylogarithm, n = 2, 3
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _zeta_nonpositive_table(n_max: int) -> tuple:
    # zeta(-m) for m = 0..n_max from Bernoulli numbers.
    b = sp.bernoulli(n_max + 1)
    return tuple([-0.5] + [-b[m + 1] / (m + 1) for m in range(1, n_max + 1)])


def _zeta_int(s: int) -> float:
    if s == 2:
        return math.pi**2 / 6.0
    if s == 3:
        return ZETA3
    if s <= 0:
        return _zeta_nonpositive_table(80)[-s]
    return float(sp.zeta(s))


def _li_series_z(n: int, z: complex) -> complex:
    total = 0j
    zk = 1 + 0j
    for k in range(1, 80):
        zk *= z
        term = zk / k**n
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def _li_series_log(n: int, mu: complex) -> complex:
    # Li_n(e^mu) = sum_{k != n-1} zeta(n-k) mu^k/k! + mu^{n-1}/(n-1)! (H_{n-1} - ln(-mu))
    if mu == 0:
        return complex(_zeta_int(n))
    harmonic = sum(1.0 / j for j in range(1, n))
    total = mu ** (n - 1) / math.factorial(n - 1) * (harmonic - _principal_log_neg(cmath.log(mu)))
    muk = 1 + 0j
    for k in range(0, 70):
        if k > 0:
            muk *= mu / k
        if k == n - 1:
            continue
        z = _zeta_int(n - k)
        if z == 0.0:
            continue
        term = z * muk
        total += term
        if k > n + 2 and abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def _principal_log_neg(mu: complex) -> complex:
    # Principal log of -z given mu = Log z.
    return complex(mu.real, mu.imag + math.pi) if mu.imag <= 0.0 else complex(mu.real, mu.imag - math.pi)


def polylog_from_log(n: int, mu: complex) -> complex:
    """Principal-branch Li_n(e^mu) for n in {2, 3}, taking mu = Log z.

    Working with the logarithm lets callers evaluate Li_n(e^{2x}) for large x
    without forming e^{2x}. Points on the cut z > 1 take the limit from below
    the real axis (the convention of mpmath and of the principal Log).
    """
    if n not in (2, 3):
        raise DomainError(f"polylog implemented for n in {{2, 3}}, got {n}")
    mu = complex(mu)
    re = mu.real
    if re < -math.log(2.0):
        return _li_series_z(n, cmath.exp(mu))
    if re <= math.log(2.0):
        return _li_series_log(n, mu)
    # |z| > 2: inversion to 1/z.
    inv = polylog_from_log(n, -mu)
    lnm = _principal_log_neg(mu)
    if n == 2:
        return -inv - math.pi**2 / 6.0 - 0.5 * lnm**2
    return inv - math.pi**2 / 6.0 * lnm - lnm**3 / 6.0


def polylog(n: int, z) -> complex:
    """Principal-branch polylogarithm Li_n(z), n in {2, 3}."""
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(_zeta_int(n))
    return polylog_from_log(n, cmath.log(z))


# ---------------------------------------------------------------------------
# Series route from the spectral representation
# ---------------------------------------------------------------------------
#
# With the cutoff frequency set to one, every shape function is a linear
# combination of
#   A^-_p = int dmu_p(w) int int w(s) w(s') cos(w (s - s'))
#   A^+_p = same with cos(w (s + s'))
#   B_p   = int dmu_p(w) int w(s)^2 cos(2 w s)
#   C_p   = int dmu_p(w) int w(s)^2
# where dmu_p = w^p dw on [0, 1] (vacuum-like) or w^p dw / (e^{pi w} - 1) on
# [0, inf) (thermal, temperature scale set to one), and the path weight w is
# the triangle (Configuration 1) or s^2 (Configuration 2) on [0, x].

def _tri_moment(n: int) -> Fraction:
    half = Fraction(1, 2)
    up = half ** (n + 2) / (n + 2)
    down = (1 - half ** (n + 1)) / (n + 1) - (1 - half ** (n + 2)) / (n + 2)
    return up + down


def _quad_moment(n: int) -> Fraction:
    return Fraction(1, n + 3)


def _upper(p: int) -> Fraction:
    half = Fraction(1, 2)
    return (1 - half ** (p + 1)) / (p + 1)


@lru_cache(maxsize=None)
def _double_moments(weight: str, sign: int) -> tuple:
    mom = _tri_moment if weight == "tri" else _quad_moment
    out = []
    for k in range(_N_TERMS):
        total = Fraction(0)
        for j in range(2 * k + 1):
            total += math.comb(2 * k, j) * (sign**j) * mom(2 * k - j) * mom(j)
        out.append(total)
    return tuple(out)


@lru_cache(maxsize=None)
def _single_moments(weight: str) -> tuple:
    out = []
    for k in range(_N_TERMS):
        if weight == "tri":
            p = 2 * k
            lower = Fraction(1, 2) ** (p + 3) / (p + 3)
            upper = _upper(p) - 2 * _upper(p + 1) + _upper(p + 2)
            out.append(4**k * (lower + upper))
        else:
            out.append(Fraction(4**k, 2 * k + 5))
    return tuple(out)


def _spectral_moment(thermal: bool, n: int) -> float:
    if thermal:
        return math.factorial(n) * float(sp.zeta(n + 1)) / math.pi ** (n + 1)
    return 1.0 / (n + 1)


@lru_cache(maxsize=None)
def _series_coefficients(kind: str, p: int, weight: str, thermal: bool) -> tuple[np.ndarray, int]:
    """Coefficients c_k and offset q such that the term is sum_k c_k x^{2k+q}."""
    span = 4 if weight == "tri" else 6
    if kind == "C":
        w2 = Fraction(1, 12) if weight == "tri" else Fraction(1, 5)
        return np.array([_spectral_moment(thermal, p) * float(w2)]), span - 1
    if kind == "B":
        moments = _single_moments(weight)
        offset = span - 1
    else:
        moments = _double_moments(weight, -1 if kind == "A-" else 1)
        offset = span
    coef = []
    for k, d in enumerate(moments):
        coef.append((-1.0) ** k * _spectral_moment(thermal, p + 2 * k) * float(d / math.factorial(2 * k)))
    return np.array(coef), offset


# (state, config) -> which -> list of (factor, kind, p)
_SERIES_TABLE = {
    ("vacuum", 1): {1: [(1 / 3, "A-", 5)], 3: [(4 / 3, "A-", 3)]},
    ("thermal", 1): {1: [(1.0, "A-", 5)], 3: [(4.0, "A-", 3)]},
    ("coherent", 1): {
        1: [(1.0, "A-", 5), (1.0, "A+", 5)],
        2: [(2.0, "C", 5), (2.0, "B", 5)],
        3: [(4.0, "A-", 3), (4.0, "A+", 3)],
        4: [(8.0, "C", 3), (8.0, "B", 3)],
    },
    ("squeezed", 1): {
        1: [(1.0, "A+", 5)],
        2: [(2.0, "B", 5)],
        3: [(4.0, "A+", 3)],
        4: [(8.0, "B", 3)],
    },
    ("vacuum", 2): {1: [(1.0, "A-", 5)], 3: [(4.0, "A-", 3)]},
    ("thermal", 2): {1: [(1 / 6, "A-", 5)], 3: [(2 / 3, "A-", 3)]},
    ("coherent", 2): {
        1: [(0.5, "A-", 5), (0.5, "A+", 5)],
        2: [(1.0, "C", 5), (1.0, "B", 5)],
        3: [(2.0, "A-", 3), (2.0, "A+", 3)],
        4: [(4.0, "C", 3), (4.0, "B", 3)],
    },
    ("squeezed", 2): {
        1: [(1.0, "A+", 5)],
        2: [(2.0, "B", 5)],
        3: [(4.0, "A+", 3)],
        4: [(8.0, "B", 3)],
    },
}

# Exact monomials (no series needed): (state, config, which) -> (coef, power)
_MONOMIALS = {
    ("vacuum", 1, 2): (1 / 108, 3),
    ("vacuum", 1, 4): (1 / 18, 3),
    ("thermal", 1, 2): (4 / 189, 3),
    ("thermal", 1, 4): (2 / 45, 3),
    ("vacuum", 2, 2): (1 / 15, 5),
    ("vacuum", 2, 4): (2 / 5, 5),
    ("thermal", 2, 2): (8 / 945, 5),
    ("thermal", 2, 4): (4 / 225, 5),
}


def _series_eval(tag: str, config: int, which: int, x: np.ndarray) -> np.ndarray:
    weight = "tri" if config == 1 else "quad"
    thermal = tag == "thermal"
    y = x * x
    total = np.zeros_like(x)
    for factor, kind, p in _SERIES_TABLE[(tag, config)][which]:
        coef, offset = _series_coefficients(kind, p, weight, thermal)
        acc = np.zeros_like(x)
        for c in coef[::-1]:
            acc = acc * y + c
        total += factor * acc * x**offset
    return total


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _f_closed(tag: str, which: int, x: np.ndarray) -> np.ndarray:
    s, c = np.sin, np.cos
    if tag == "vacuum":
        if which == 1:
            return 1 + 2 / (3 * x) * (s(x) - 8 * s(x / 2)) + (2 / 3 * c(x) - 32 / 3 * c(x / 2) + 10) / x**2
        if which == 3:
            return 32 / 3 * cin(x / 2) - 8 / 3 * cin(x)
    if tag == "thermal":
        q = np.exp(-x)
        if which == 1:
            return (q**4 + 16 * q**3 + 26 * q**2 + 16 * q + 1) / (-np.expm1(-2 * x)) ** 2 - 15 / x**2
        if which == 3:
            return 4 * math.log(2) + 4 * x + 12 * np.log1p(-q) - 12 * np.log(x) - 4 * np.log1p(q)
    if tag in ("coherent", "squeezed"):
        if which == 2:
            bracket = 49 + 24 * (x**2 - 2) * c(x) + (2 * x**2 - 1) * c(2 * x) - 4 * x * (12 - 2 * x**2 + c(x)) * s(x)
            base = bracket / (8 * x**3)
            return base + x**3 / 36 if tag == "coherent" else base
        if which == 4:
            base = 4 * s(x) + 2 / x * (2 * c(x) + c(x) ** 2 - 3)
            return base + x**3 / 6 if tag == "coherent" else base
    if tag == "coherent":
        if which == 1:
            return (3.5 + (3 * s(2 * x) - 16 * (9 * s(x / 2) - 3 * s(x) + s(1.5 * x))) / (6 * x)
                    + (1495 - 1728 * c(x / 2) + 288 * c(x) - 64 * c(1.5 * x) + 9 * c(2 * x)) / (36 * x**2))
        if which == 3:
            return 48 * cin(x / 2) - 32 * cin(x) + 16 * cin(1.5 * x) - 4 * cin(2 * x)
    if tag == "squeezed":
        if which == 1:
            return (0.5 + (s(2 * x) + 12 * s(x) - 16 * s(x / 2) - 16 / 3 * s(1.5 * x)) / (2 * x)
                    + (415 - 576 * c(x / 2) + 216 * c(x) - 64 * c(1.5 * x) + 9 * c(2 * x)) / (36 * x**2))
        if which == 3:
            return 16 * cin(x / 2) - 24 * cin(x) + 16 * cin(1.5 * x) - 4 * cin(2 * x)
    raise AssertionError("unreachable")


def _g_thermal_III(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    for i, xi in enumerate(x.ravel()):
        mu = 2.0 * xi
        log1mz = complex(mu + math.log1p(-math.exp(-mu)), math.pi)
        li2 = polylog_from_log(2, mu)
        li3 = polylog_from_log(3, mu)
        val = (xi**4 / 9 + 4 / 9 * xi**3 + 2 / 3 * xi**2 - 4 / 3 * xi**2 * log1mz
               - 4 / 3 * xi * li2 + 2 / 3 * li3 - 2 / 3 * ZETA3)
        if abs(val.imag) > 1e-8 * max(abs(val.real), 1e-300):
            raise NumericalConsistencyError(
                f"imaginary residual {val.imag:.3e} in thermal g^III at x={xi} (real part {val.real:.3e})")
        out.flat[i] = val.real
    return out


def _g_closed(tag: str, which: int, x: np.ndarray) -> np.ndarray:
    s, c = np.sin, np.cos
    if tag == "vacuum":
        if which == 1:
            return x**4 / 4 - 12 + 8 * cin(x) + 4 * x * s(x) + 12 * c(x)
        if which == 3:
            return 2 * x**4 - 8 * x**2 + 16 * c(x) + 16 * x * s(x) - 16
    if tag == "thermal":
        if which == 1:
            coth = 1.0 / np.tanh(x)
            csch = 2.0 * np.exp(-x) / -np.expm1(-2.0 * x)
            log_term = 2 * x + np.log1p(-np.exp(-2 * x)) - np.log(2 * x)
            return 1 - 2 * x / 3 + x**4 / 90 + 2 / 3 * log_term - x / 3 * (2 * coth + x * csch**2)
        if which == 3:
            return _g_thermal_III(x)
    if tag == "coherent":
        if which == 1:
            return (x**4 / 8 - 59 / 16 + (59 - 22 * x**2) * c(2 * x) / 16 + 2 * cin(2 * x)
                    + x / 8 * (27 - 2 * x**2) * s(2 * x))
        if which == 2:
            return x**5 / 30 + (15 + (-15 + 18 * x**2 - 2 * x**4) * c(2 * x)) / (8 * x) + (x**2 - 3) * s(2 * x)
        if which == 3:
            return x**4 - 3.5 * x**2 - 4 + (4 - 4.5 * x**2) * c(2 * x) - x * (x**2 - 8) * s(2 * x)
        if which == 4:
            return 1.5 * x + x**5 / 5 + x * (4.5 - x**2) * c(2 * x) + 3 * (x**2 - 1) * s(2 * x)
    if tag == "squeezed":
        if which == 1:
            return (37 / 8 - 12 * c(x) + (59 - 22 * x**2) * c(2 * x) / 8 - 8 * cin(x) + 4 * cin(2 * x)
                    - x / 2 * (8 + (2 * x**2 - 27) * c(x)) * s(x))
        if which == 2:
            return (15 + (-15 + 18 * x**2 - 2 * x**4) * c(2 * x)) / (4 * x) + 2 * (x**2 - 3) * s(2 * x)
        if which == 3:
            return x**2 + 8 - 16 * c(x) + (8 - 9 * x**2) * c(2 * x) - 4 * x * (4 + (x**2 - 8) * c(x)) * s(x)
        if which == 4:
            return 3 * x + x * (9 - 2 * x**2) * c(2 * x) + 6 * (x**2 - 1) * s(2 * x)
    raise AssertionError("unreachable")


def _shape(config: int, state, which, x, method: str):
    tag = as_tag(state).value
    w = _which(which)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(~np.isfinite(xa)):
        raise DomainError("shape functions need finite x >= 0")
    mono = _MONOMIALS.get((tag, config, w))
    if mono is not None:
        return _scalar_or_array(x, mono[0] * xa ** mono[1])
    if method not in ("auto", "series", "closed"):
        raise DomainError(f"method must be auto, series or closed, got {method!r}")
    flat = np.atleast_1d(xa).ravel()
    out = np.empty_like(flat)
    if method == "series":
        use_series = np.ones(flat.shape, bool)
    elif method == "closed":
        if np.any(flat == 0.0):
            raise DomainError("closed forms are singular at x = 0; use the series route")
        use_series = np.zeros(flat.shape, bool)
    else:
        use_series = flat < SERIES_SWITCH
    if np.any(use_series):
        out[use_series] = _series_eval(tag, config, w, flat[use_series])
    if np.any(~use_series):
        closed = _f_closed if config == 1 else _g_closed
        out[~use_series] = closed(tag, w, flat[~use_series])
    return _scalar_or_array(x, out.reshape(xa.shape))


def shape_f(state: StateLike, which, x, method: str = "auto"):
    """Configuration-1 shape function f_A^(which)(x), A = graviton state."""
    return _shape(1, state, which, x, method)


def shape_g(state: StateLike, which, x, method: str = "auto"):
    """Configuration-2 shape function g_A^(which)(x), A = graviton state.

    The thermal g^III is evaluated in complex arithmetic (principal-branch
    Li_2, Li_3 of e^{2x} and Log(1 - e^{2x})); its imaginary parts must cancel
    and a residual above 1e-8 relative raises NumericalConsistencyError.
    """
    return _shape(2, state, which, x, method)
