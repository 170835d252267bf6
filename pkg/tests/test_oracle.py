import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from gravidec import oracle
from gravidec.errors import DomainError, NonConvergenceError
from gravidec.special_functions import F_n


def poly_cos_integral(coef, k, b):
    """Exact int_0^b p(x) cos(kx) dx by repeated integration by parts."""

    def antiderivative(x):
        total, d, j = 0j, np.asarray(coef, dtype=float), 0
        while d.size and np.any(d):
            total += (-1) ** j * P.polyval(x, d) / (1j * k) ** (j + 1)
            d = P.polyder(d)
            j += 1
        return (np.exp(1j * k * x) * total).real

    return antiderivative(b) - antiderivative(0.0)


def test_adaptive_quad_square():
    r = oracle.adaptive_quad(lambda x: x**2, 0.0, 1.0, 1e-12)
    assert abs(r.value - 1.0 / 3.0) < 1e-12
    assert r.error_estimate <= 1e-12
    assert r.evaluations > 0


def test_adaptive_quad_sine():
    assert abs(oracle.adaptive_quad(np.sin, 0.0, math.pi, 1e-12).value - 2.0) < 1e-12


def test_adaptive_quad_reproduces_f5():
    x = 3.0
    r = oracle.adaptive_quad(lambda y: y**5 * np.cos(y), 0.0, x, 1e-13)
    assert r.value / x**6 == pytest.approx(F_n(5, x), rel=1e-10)


def test_adaptive_quad_breakpoints_handle_kink():
    r = oracle.adaptive_quad(lambda x: np.abs(x - 0.3), 0.0, 1.0, 1e-12, points=[0.3])
    assert r.value == pytest.approx(0.5 * (0.3**2 + 0.7**2), abs=1e-13)


def test_adaptive_quad_errors():
    with pytest.raises(DomainError):
        oracle.adaptive_quad(np.sin, 1.0, 0.0)
    with pytest.raises(DomainError):
        oracle.adaptive_quad(np.sin, 0.0, math.inf)
    with pytest.raises(NonConvergenceError):
        oracle.adaptive_quad(lambda x: np.sin(1.0 / x), 1e-12, 1.0, 1e-14, max_intervals=20)


def test_tolerance_honesty_on_random_poly_cos():
    rng = np.random.default_rng(2024)
    honest = 0
    for _ in range(100):
        deg = int(rng.integers(0, 7))
        coef = rng.normal(size=deg + 1)
        k = rng.uniform(0.5, 30.0)
        b = rng.uniform(0.5, 5.0)
        r = oracle.adaptive_quad(lambda x: P.polyval(x, coef) * np.cos(k * x), 0.0, b, 1e-10)
        if abs(r.value - poly_cos_integral(coef, k, b)) <= r.error_estimate:
            honest += 1
    assert honest >= 99


def test_oscillatory_plain_cosine():
    tau, lam = 1.0, 500.0
    r = oracle.oscillatory_quad(lambda w: np.ones_like(w), tau, 0.0, lam, 1e-12)
    assert abs(r.value - math.sin(lam * tau) / tau) < 1e-10


def test_oscillatory_quintic_matches_f5():
    lam, tau = 1.0, 100.0
    r = oracle.oscillatory_quad(lambda w: w**5, tau, 0.0, lam, 1e-12)
    assert r.value == pytest.approx(lam**6 * F_n(5, lam * tau), rel=1e-8)


def test_oscillatory_bose_integral_to_infinity():
    def env(w):
        w = np.asarray(w, dtype=float)
        safe = np.where(w > 0.0, w, 1.0)
        return np.where(w > 0.0, safe**3 / np.expm1(safe), 0.0)

    r = oracle.oscillatory_quad(env, 0.0, 0.0, math.inf, 1e-12, length_scale=2.0)
    assert r.value == pytest.approx(math.pi**4 / 15.0, rel=1e-8)


def test_oscillatory_slow_tail_uses_acceleration():
    # int_1^inf cos(x)/x dx = -Ci(1)
    r = oracle.oscillatory_quad(lambda x: 1.0 / x, 1.0, 1.0, math.inf, 1e-10)
    assert r.value == pytest.approx(-0.3374039229009681, rel=1e-8)


def test_oscillatory_rejects_bad_kind():
    with pytest.raises(DomainError):
        oracle.oscillatory_quad(lambda x: x, 1.0, 0.0, 1.0, kind="tan")


def test_nested_constant_kernel():
    r = oracle.nested_time_quad(lambda t, s: np.ones(np.broadcast(t, s).shape), (np.ones_like, np.ones_like), 3.0)
    assert r.value == pytest.approx(9.0, rel=1e-14)


@pytest.mark.parametrize("T", [0.7, 3.0, 12.0])
def test_nested_cosine_kernel_closed_form(T):
    # int int t t' cos(t - t') = |int_0^T t e^{it} dt|^2 = |e^{iT}(1 - iT) - 1|^2
    exact = abs(complex(math.cos(T), math.sin(T)) * complex(1.0, -T) - 1.0) ** 2
    r = oracle.nested_time_quad(lambda t, s: np.cos(t - s), (lambda t: t, lambda t: t), T, 1e-12)
    assert r.value == pytest.approx(exact, rel=1e-10)


def test_nested_separable_kernel():
    u = lambda t: np.exp(-t) * np.cos(2 * t)  # noqa: E731
    w = lambda t: 1.0 + t**2  # noqa: E731
    single = oracle.adaptive_quad(lambda t: w(t) * u(t), 0.0, 2.5, 1e-14).value
    r = oracle.nested_time_quad(lambda t, s: u(t) * u(s), (w, w), 2.5, 1e-12)
    assert r.value == pytest.approx(single**2, rel=1e-10)


def test_nested_rejects_empty_interval():
    with pytest.raises(DomainError):
        oracle.nested_time_quad(lambda t, s: t * s, (np.ones_like, np.ones_like), 0.0)


def test_time_quad_matches_adaptive():
    f = lambda t: np.exp(-t) * t**3  # noqa: E731
    assert oracle.time_quad(f, 4.0, 1e-13).value == pytest.approx(
        oracle.adaptive_quad(f, 0.0, 4.0, 1e-14).value, rel=1e-12)


def test_gauss_legendre_exact_for_polynomials():
    x, w = oracle.gauss_legendre(8)
    assert np.sum(w * x**14) == pytest.approx(2.0 / 15.0, rel=1e-14)


def test_sample_moments_of_standard_normal():
    x = np.random.default_rng(7).standard_normal(200_000)
    m = oracle.sample_moments(x)
    assert m.n == x.size
    assert abs(m.mean) < 4 * m.sem
    assert abs(m.var - 1.0) < 4 * m.var_se
    assert abs(m.skew) < 4 * m.skew_se
    assert abs(m.excess_kurtosis) < 4 * m.kurtosis_se


def test_sphere_quad_low_moments():
    assert oracle.sphere_quad(lambda n: 1.0) == pytest.approx(4 * math.pi, rel=1e-14)
    assert oracle.sphere_quad(lambda n: n[2] ** 2) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    assert abs(oracle.sphere_quad(lambda n: n[0] * n[1])) < 1e-14


@given(
    coef=st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=8),
    a=st.floats(min_value=-5, max_value=0),
    width=st.floats(min_value=0.1, max_value=5),
)
def test_polynomials_integrate_exactly(coef, a, width):
    b = a + width
    anti = P.polyint(coef)
    exact = P.polyval(b, anti) - P.polyval(a, anti)
    r = oracle.adaptive_quad(lambda x: P.polyval(x, coef), a, b, 1e-12)
    assert abs(r.value - exact) <= 1e-11 * max(1.0, abs(exact))


@given(split=st.floats(min_value=0.05, max_value=0.95), k=st.floats(min_value=0.0, max_value=40.0))
def test_additivity_over_subintervals(split, k):
    f = lambda x: np.cos(k * x) * np.exp(-x)  # noqa: E731
    whole = oracle.adaptive_quad(f, 0.0, 2.0, 1e-13).value
    parts = oracle.adaptive_quad(f, 0.0, 2 * split, 1e-13).value + oracle.adaptive_quad(f, 2 * split, 2.0, 1e-13).value
    assert whole == pytest.approx(parts, abs=1e-12)
