import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravidec import oracle
from gravidec import qbm_validation as qbm
from gravidec.errors import DomainError

BATH = qbm.OhmicBath(gamma0=1.0, cutoff=1.0, mass=1.0, beta=0.5, Omega=0.05)


def bath_with(**kw):
    base = dict(gamma0=BATH.gamma0, cutoff=BATH.cutoff, mass=BATH.mass, beta=BATH.beta, Omega=BATH.Omega)
    base.update(kw)
    return qbm.OhmicBath(**base)


def test_spectral_density_examples():
    assert qbm.spectral_density(BATH, 0.0) == 0.0
    assert qbm.spectral_density(BATH, 1.0) == pytest.approx(4 / math.pi / 2, rel=1e-15)
    w = 0.01
    assert qbm.spectral_density(BATH, w) == pytest.approx(4 / math.pi * w, rel=0.01)


def test_spectral_density_rejects_negative():
    with pytest.raises(DomainError):
        qbm.spectral_density(BATH, -1.0)


def test_kernels_at_origin():
    d, n = qbm.ld_kernels(BATH, 0.0)
    assert d == 2.0 and n == pytest.approx(2.0 / 0.5, rel=1e-15)


def test_kernel_ratio_constant():
    d, n = qbm.ld_kernels(BATH, np.linspace(0.0, 10.0, 21))
    assert np.allclose(n / d, 1 / (BATH.beta * BATH.cutoff), rtol=1e-14, atol=0.0)


@pytest.mark.parametrize("tau", [0.3, 1.0, 4.0])
def test_dissipation_kernel_from_sine_transform(tau):
    res = oracle.oscillatory_quad(lambda w: qbm.spectral_density(BATH, w), tau, 0.0, math.inf,
                                  1e-11, kind="sin")
    assert res.value == pytest.approx(qbm.ld_kernels(BATH, tau)[0], rel=1e-8)


def test_sine_transform_recovers_spectral_density():
    for w in np.geomspace(1e-2, 1e2, 9):
        assert qbm.dissipation_sine_transform(BATH, w) == pytest.approx(qbm.spectral_density(BATH, w), rel=1e-6)


def test_caldeira_leggett_stated_values():
    b = bath_with(gamma0=0.3, cutoff=20.0, Omega=2.0, mass=3.0, beta=0.4)
    d_omega2, gamma, sigma2, big_sigma2 = qbm.caldeira_leggett_coefficients(b)
    den = 400.0 + 4.0
    assert d_omega2 == pytest.approx(-2 * 0.3 * 8000.0 / den, rel=1e-15)
    assert gamma == pytest.approx(0.3 * 400.0 / den, rel=1e-15)
    assert sigma2 == pytest.approx(2 * 3.0 * 0.3 / 0.4 * 400.0 / den, rel=1e-15)
    assert big_sigma2 == pytest.approx(-2 * 0.3 / 0.4 * 20.0 / den, rel=1e-15)


def test_zero_frequency_damping():
    assert qbm.caldeira_leggett_coefficients(bath_with(Omega=0.0))[1] == BATH.gamma0


@settings(max_examples=40)
@given(st.floats(1e-3, 1e3), st.floats(1.0, 1e4), st.floats(1e-30, 1e3),
       st.floats(1e-6, 1e6), st.floats(0.0, 0.09))
def test_caldeira_leggett_identity_and_signs(gamma0, cutoff, mass, beta, om_frac):
    b = qbm.OhmicBath(gamma0, cutoff, mass, beta, om_frac * cutoff)
    d_omega2, gamma, sigma2, big_sigma2 = qbm.caldeira_leggett_coefficients(b)
    assert d_omega2 < 0 and gamma > 0 and sigma2 > 0 and big_sigma2 < 0
    assert big_sigma2 == pytest.approx(-sigma2 / (mass * cutoff), rel=1e-13)


@pytest.mark.parametrize("omega", [0.0, 0.05, 0.09])
def test_caldeira_leggett_from_integrals(omega):
    b = bath_with(Omega=omega, gamma0=0.7, mass=2.0)
    closed = qbm.caldeira_leggett_coefficients(b)
    quad = qbm.caldeira_leggett_integrals(b)
    assert quad == pytest.approx(closed, rel=1e-8)


@pytest.mark.parametrize("beta_omega", [1e-3, 0.1, 5.0])
def test_fdt_residual(beta_omega):
    omega = 0.1
    b = bath_with(beta=beta_omega / omega)
    assert qbm.fdt_check(b, omega) < 1e-6


def test_high_temperature_noise_transform():
    omega = 0.1
    b = bath_with(beta=1e-3 / omega)
    high_t = 2 / (b.beta * omega) * 0.5 * qbm.spectral_density(b, omega)
    assert qbm.noise_cosine_transform(b, omega) == pytest.approx(high_t, rel=0.01)


def test_exact_kernel_approaches_high_temperature_form():
    b = bath_with(beta=1e-3)
    tau = np.array([0.5, 2.0, 5.0])
    assert qbm.exact_noise_kernel(b, tau) == pytest.approx(qbm.ld_kernels(b, tau)[1], rel=1e-3)


def test_exact_kernel_matches_frequency_integral():
    b = bath_with(beta=2.0)
    tau = 1.3
    direct = oracle.oscillatory_quad(
        lambda w: 0.5 * qbm.spectral_density(b, w) / np.tanh(0.5 * np.maximum(w, 1e-300) * b.beta),
        tau, 0.0, math.inf, 1e-11)
    assert qbm.exact_noise_kernel(b, tau) == pytest.approx(direct.value, rel=1e-8)


def test_singular_matsubara_split():
    with pytest.raises(DomainError):
        qbm.exact_noise_kernel(bath_with(beta=2 * math.pi), 1.0)


def test_regime_warning():
    with pytest.warns(qbm.RegimeWarning):
        b = bath_with(Omega=0.5)
    assert b.regime_warning
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not bath_with(Omega=0.0).regime_warning


def test_bath_validation():
    with pytest.raises(DomainError):
        bath_with(beta=0.0)
    with pytest.raises(DomainError):
        bath_with(Omega=-1.0)
    with pytest.raises(DomainError):
        qbm.fdt_check(BATH, 0.0)
