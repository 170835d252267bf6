import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravidec import decoherence as dec
from gravidec import geometry
from gravidec.errors import (
    DomainError,
    NoLongTimeDecoherenceError,
    SaturationError,
    UnsupportedStateError,
)
from gravidec.noise_kernels import GravitonState
from gravidec.special_functions import shape_g
from gravidec.units_constants import C, E_P, HBAR, K_B, M_P, PhysicalParams

VAC = GravitonState.vacuum()
P = PhysicalParams(m=1e-20, v=10.0, L0=1e-6)
LAM = P.Lambda / HBAR
NS_MASS, NS_RADIUS = geometry.SOURCES["neutron_star"]


def thermal_at(ratio, params=P):
    return GravitonState.thermal(ratio * params.Lambda / (math.pi * K_B))


STATES = [VAC, thermal_at(0.5), GravitonState.coherent(1.3), GravitonState.squeezed(0.7)]
IDS = [s.tag.value for s in STATES]


def unit_time(state, params):
    return HBAR / dec.state_coefficients(state, params).Lambda_A


# --- coefficients ----------------------------------------------------------

def test_vacuum_coefficients():
    co = dec.state_coefficients(VAC, P)
    assert (co.b_A, co.K1, co.K2) == (1.0, 2.0, 1.0)
    assert co.Lambda_A == P.Lambda
    assert co.deltaOmega_t is None


def test_squeezed_b():
    assert dec.state_coefficients(GravitonState.squeezed(1.0), P).b_A == pytest.approx(3.7622, abs=1e-4)


def test_state_constants_table():
    a, r = 1.3, 0.7
    co_t = dec.state_coefficients(thermal_at(0.5), P)
    assert (co_t.K1, co_t.K2) == pytest.approx((4 / 3, 12.0))
    assert co_t.Lambda_A == pytest.approx(math.pi * K_B * thermal_at(0.5).T_g, rel=1e-15)
    co_c = dec.state_coefficients(GravitonState.coherent(a), P)
    assert (co_c.K1, co_c.K2) == pytest.approx((a * a / 3, a * a))
    co_s = dec.state_coefficients(GravitonState.squeezed(r), P)
    assert (co_s.K1, co_s.K2) == pytest.approx((-2 / 3 * math.sinh(2 * r), -math.sinh(2 * r)))


def test_kappa_definition():
    p = P.replace(eta=2.0, T_int=500.0)
    co = dec.state_coefficients(VAC, p)
    assert co.kappa_A == pytest.approx(2.0 * math.pi * K_B * 500.0 * p.Lambda, rel=1e-15)


def test_delta_omega_earth():
    assert abs(dec.state_coefficients(VAC, P).deltaOmega - 1.0) < 1e-12


def test_delta_omega_thermal_as_printed():
    s = thermal_at(0.3)
    lam_t = math.pi * K_B * s.T_g
    expected = 1 + 6 * ((HBAR / P.Lambda) ** 2 - 7 / 20 * (HBAR / lam_t) ** 2) * P.tidal_rate
    assert dec.state_coefficients(s, P).deltaOmega_t == pytest.approx(expected, rel=1e-15)


@given(st.floats(1e-9, 1e6), st.floats(1e20, 1e35), st.floats(1e3, 1e12))
def test_delta_omega_at_most_one(L0, M, R):
    p = PhysicalParams(m=1.0, v=1.0, L0=L0, M_N=M, R_N=R)
    assert dec.state_coefficients(VAC, p).deltaOmega <= 1.0


# --- Gamma_1 ---------------------------------------------------------------

@pytest.mark.parametrize("state", STATES, ids=IDS)
def test_gamma1_zero_at_origin(state):
    assert dec.gamma1(state, P, 0.0) == 0.0


def test_gamma1_short_time_vacuum():
    x = 1e-2
    do = dec.state_coefficients(VAC, P).deltaOmega
    expected = do * (P.v / C) ** 2 * (P.m / M_P) ** 2 * x**4 / (90 * math.pi)
    assert dec.gamma1(VAC, P, x / LAM) == pytest.approx(expected, rel=0.02)


def test_gamma1_long_time_vacuum():
    p = PhysicalParams(m=1e-20, v=1e-6 * C, L0=1e-9, eta=1.0, T_int=1e4)
    lam = p.Lambda / HBAR
    x = 1e14
    do = dec.state_coefficients(VAC, p).deltaOmega
    expected = 4 / 135 * do * (p.v / C) ** 2 * (p.eta * K_B * p.T_int * p.Lambda / E_P**2) * x**3
    assert dec.gamma1(VAC, p, x / lam) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("state", STATES, ids=IDS)
@pytest.mark.parametrize("x", [0.5, 50.0])
def test_gamma1_matches_quadrature(state, x):
    tf = x * unit_time(state, P)
    closed = dec.gamma1(state, P, tf)
    general = dec.gamma1_general(state, P, dec.triangular_path(P.v, tf), P.Xi, tf)
    assert closed == pytest.approx(general, rel=1e-4)


@pytest.mark.parametrize("state", [VAC, GravitonState.squeezed(0.4)], ids=["vacuum", "squeezed"])
def test_gamma1_matches_quadrature_with_internal_and_tides(state):
    # Internal-DoF share sizeable and tides relevant (neutron star, long wavelength cutoff).
    p = PhysicalParams(m=1e-41, v=1e3, L0=C / 1.3e4, eta=1.0, T_int=1e4, M_N=NS_MASS, R_N=NS_RADIUS)
    tf = 5.0 * unit_time(state, p)
    closed = dec.gamma1(state, p, tf)
    general = dec.gamma1_general(state, p, dec.triangular_path(p.v, tf), p.Xi, tf)
    assert closed == pytest.approx(general, rel=1e-6)


def test_gamma1_general_zero_separation():
    assert dec.gamma1_general(VAC, P, lambda t: np.zeros_like(np.asarray(t, float)), P.Xi, 3 / LAM) == 0.0


def test_gamma1_general_exchange_symmetry():
    tf = 4.0 / LAM
    path = dec.triangular_path(P.v, tf)
    a = dec.gamma1_general(STATES[2], P, path, P.Xi, tf)
    b = dec.gamma1_general(STATES[2], P, lambda t: -path(t), P.Xi, tf)
    assert a == pytest.approx(b, rel=1e-12)


def test_gamma1_general_velocity_scaling():
    tf = 4.0 / LAM
    a = dec.gamma1_general(VAC, P, dec.triangular_path(P.v, tf), P.Xi, tf)
    b = dec.gamma1_general(VAC, P, dec.triangular_path(2 * P.v, tf), P.Xi, tf)
    assert b == pytest.approx(4 * a, rel=1e-10)


def test_gamma1_vanishing_separation_speed():
    assert dec.gamma1_general(VAC, P, dec.triangular_path(0.0, 1 / LAM), P.Xi, 1 / LAM) == 0.0


def test_squeezed_zero_is_vacuum():
    t = np.geomspace(1e-3, 1e4, 30) / LAM
    assert np.array_equal(dec.gamma1(GravitonState.squeezed(0.0), P, t), dec.gamma1(VAC, P, t))


def test_monotone_long_time_growth():
    # Once the internal-DoF term dominates, Gamma_1 grows without bound.
    p = PhysicalParams(m=1e-20, v=1e-6 * C, L0=1e-9, eta=1.0, T_int=1e4)
    for state in STATES:
        t = np.geomspace(1e11, 1e16, 300) * unit_time(state, p)
        g = dec.gamma1(state, p, t)
        assert np.all(np.diff(g) > 0.0), state.tag


def test_gamma1_rejects_negative_time():
    with pytest.raises(DomainError):
        dec.gamma1(VAC, P, -1.0)


# --- Gamma_2 ---------------------------------------------------------------

def test_gamma2_equal_speeds():
    assert dec.gamma2(VAC, P.replace(eta=1.0), 30.0, 30.0, 5 / LAM) == 0.0


def test_gamma2_vacuum_reduces_to_g_functions():
    v1, v2, x = 30.0, 10.0, 3.0
    dv = v1**2 - v2**2
    expected = P.m**2 * dv**2 / (15 * math.pi * E_P**2) * (
        shape_g("vacuum", "I", x) - P.tidal_rate / LAM**2 * shape_g("vacuum", "III", x))
    assert dec.gamma2(VAC, P, v1, v2, x / LAM) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("state", STATES, ids=IDS)
def test_gamma2_matches_quadrature(state):
    p = P.replace(eta=0.5, T_int=1e4)
    for x in (0.7, 9.0):
        tf = x * unit_time(state, p)
        assert dec.gamma2(state, p, 30.0, 10.0, tf) == pytest.approx(
            dec.gamma2_general(state, p, 30.0, 10.0, tf), rel=1e-4)


def test_gamma2_rejects_superluminal():
    with pytest.raises(DomainError):
        dec.gamma2(VAC, P, C, 0.0, 1.0)


def test_decoherence_curve_two_configs():
    t = np.linspace(0.0, 5.0, 6) / LAM
    one = dec.decoherence_curve(VAC, P, t)
    two = dec.decoherence_curve(VAC, P, t, "two", 30.0, 10.0)
    assert one.config is dec.Config.one and two.config is dec.Config.two
    assert one.gamma[0] == 0.0 and two.gamma[0] == 0.0
    assert np.all(np.isfinite(one.gamma)) and np.all(np.isfinite(two.gamma))
    assert np.array_equal(two.gamma, dec.gamma2(VAC, P, 30.0, 10.0, t))


# --- decoherence times -----------------------------------------------------

def test_short_time_momentum_threshold():
    threshold = math.sqrt(90 * math.pi) * M_P * C
    assert threshold == pytest.approx(110.0, abs=5.0)
    do = dec.state_coefficients(VAC, P).deltaOmega
    p = P.replace(m=math.sqrt(90 * math.pi / do) * M_P * C / P.v)
    assert dec.dec_time_short(VAC, p) == pytest.approx(HBAR / p.Lambda, rel=1e-12)


def test_ultrarelativistic_mass_bound():
    assert math.sqrt(90 * math.pi) * M_P == pytest.approx(3.7e-7, rel=0.1)


def test_short_time_state_factors():
    base = dec.dec_time_short(VAC, P)
    assert dec.dec_time_short(GravitonState.squeezed(0.0), P) == base
    assert dec.dec_time_short(GravitonState.coherent(2.0), P) == pytest.approx(base * 5 ** -0.25, rel=1e-14)
    assert dec.dec_time_short(GravitonState.squeezed(0.8), P) == pytest.approx(base * math.exp(0.4), rel=1e-14)


@pytest.mark.parametrize(
    "state", [VAC, GravitonState.thermal(1e4), GravitonState.coherent(1.3), GravitonState.squeezed(0.8)],
    ids=IDS)
def test_short_time_consistency(state):
    p = PhysicalParams(m=1e3, v=1e3, L0=1e-6)
    t = dec.dec_time_short(state, p)
    assert t < 0.02 * unit_time(state, p)
    assert dec.gamma1(state, p, t) == pytest.approx(1.0, rel=0.01)


def test_long_time_example():
    p = PhysicalParams(m=1e-20, v=1e-6 * C, L0=1e-9, eta=1.0, T_int=1e4)
    assert 0.3e5 <= dec.dec_time_long(VAC, p) <= 3e5


def test_long_time_state_factors():
    p = PhysicalParams(m=1e-20, v=1e-6 * C, L0=1e-9, eta=1.0, T_int=1e4)
    base = dec.dec_time_long(VAC, p)
    assert dec.dec_time_long(GravitonState.coherent(0.0), p) == base
    ratio = dec.dec_time_long(GravitonState.squeezed(100.0), p) / base
    assert 1e-30 <= ratio <= 1e-28
    assert ratio == pytest.approx(math.exp(-200 / 3) * 2 ** (1 / 3), rel=1e-12)


def test_long_time_needs_internal_dofs():
    with pytest.raises(NoLongTimeDecoherenceError):
        dec.dec_time_long(VAC, P)


def test_numeric_short_regime():
    p = PhysicalParams(m=1e3, v=1e3, L0=1e-6)
    assert dec.dec_time_numeric(VAC, p) == pytest.approx(dec.dec_time_short(VAC, p), rel=0.05)


def test_numeric_long_regime():
    p = PhysicalParams(m=1e-20, v=1e-6 * C, L0=1e-9, eta=1.0, T_int=1e4)
    assert dec.dec_time_numeric(VAC, p) == pytest.approx(dec.dec_time_long(VAC, p), rel=0.1)


def test_numeric_configuration_two_root():
    p = PhysicalParams(m=1e3, v=1e3, L0=1e-6)
    t = dec.dec_time_numeric(VAC, p, "two", v1=1e3, v2=0.0)
    assert dec.gamma2(VAC, p, 1e3, 0.0, t) == pytest.approx(1.0, rel=1e-9)


def test_numeric_saturation():
    p = PhysicalParams(m=1e-22, v=1e-6 * C, L0=1e-6)
    expected = 16 / (5 * math.pi) * dec.state_coefficients(VAC, p).deltaOmega * (p.v / C) ** 2 * (p.m / M_P) ** 2
    with pytest.raises(SaturationError) as info:
        dec.dec_time_numeric(VAC, p)
    assert info.value.gamma_sat == pytest.approx(expected, rel=1e-10)
    assert dec.saturation_value(VAC, p) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("state", STATES, ids=IDS)
def test_saturation_plateau_all_states(state):
    # Tides switched off by a distant, light source.
    p = P.replace(M_N=1.0, R_N=1e12)
    t = 1e6 * unit_time(state, p)
    assert dec.gamma1(state, p, t) == pytest.approx(dec.saturation_value(state, p), rel=1e-3)


# --- recoherence -----------------------------------------------------------

def test_recoherence_vacuum_earth_overflows():
    p = PhysicalParams(m=1e-20, v=1.0, L0=1e3)
    exponent = (p.Lambda / HBAR) ** 2 / (8 * p.tidal_rate)
    assert exponent == pytest.approx(7.5e15, rel=0.1)
    assert dec.recoherence_time(VAC, p) == math.inf


def test_recoherence_vacuum_finite_case():
    p = PhysicalParams(m=1e-20, v=1.0, L0=2.6e3, M_N=NS_MASS, R_N=NS_RADIUS)
    exponent = (p.Lambda / HBAR) ** 2 / (8 * p.tidal_rate)
    assert dec.recoherence_time(VAC, p) == pytest.approx(HBAR / p.Lambda * math.exp(exponent), rel=1e-12)


def test_recoherence_no_tides_is_infinite():
    p = PhysicalParams(m=1e-20, v=1.0, L0=1e-6, M_N=1e-30, R_N=1e30)
    assert dec.recoherence_time(VAC, p) == math.inf


def test_recoherence_thermal_earth():
    p = PhysicalParams(m=1e-20, v=1.0, L0=1e-6)
    t = dec.recoherence_time(GravitonState.thermal(1.0), p)
    lam_t = math.pi * K_B * 1.0
    expected = lam_t / (4 * HBAR) / p.tidal_rate * (1 + (p.Lambda / lam_t) ** 2)
    assert t == pytest.approx(expected, rel=1e-12)
    prefactor = lam_t / (4 * HBAR) / p.tidal_rate
    assert round(math.log10(prefactor)) == 17


def test_recoherence_errors():
    with pytest.raises(UnsupportedStateError):
        dec.recoherence_time(GravitonState.coherent(1.0), P)
    with pytest.raises(UnsupportedStateError):
        dec.recoherence_time(GravitonState.squeezed(1.0), P)
    with pytest.raises(DomainError):
        dec.recoherence_time(VAC, P.replace(eta=1.0))
