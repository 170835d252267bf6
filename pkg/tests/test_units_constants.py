import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravidec.errors import DomainError
from gravidec.units_constants import (
    C,
    CONSTANTS,
    E_P,
    G,
    HBAR,
    K_B,
    L_P,
    M_P,
    T_P,
    TEMP_P,
    PhysicalParams,
    cutoff_energy,
    dimensionless_time,
    from_internal,
    to_internal,
)


def two_sig(value: float) -> float:
    return float(f"{value:.1e}")


def test_planck_quantities_self_consistent():
    assert M_P == pytest.approx(math.sqrt(HBAR * C / G), rel=1e-12)
    assert L_P == pytest.approx(math.sqrt(HBAR * G / C**3), rel=1e-12)
    assert T_P == pytest.approx(math.sqrt(HBAR * G / C**5), rel=1e-12)
    assert E_P == pytest.approx(M_P * C**2, rel=1e-12)
    assert TEMP_P == pytest.approx(E_P / K_B, rel=1e-12)
    assert L_P == pytest.approx(C * T_P, rel=1e-12)


@pytest.mark.parametrize(
    "value, printed",
    [(L_P, 1.6e-35), (T_P, 5.4e-44), (M_P, 2.2e-8), (E_P, 2.0e9), (TEMP_P, 1.4e32)],
)
def test_planck_table_two_significant_figures(value, printed):
    assert two_sig(value) == printed


def test_frozen_math_constants():
    assert CONSTANTS.euler_gamma == pytest.approx(0.5772156649015329, rel=1e-15)
    assert CONSTANTS.zeta3 == pytest.approx(1.2020569031595943, rel=1e-15)


@pytest.mark.parametrize("L0, printed", [(1e-6, 9.0e28), (1e3, 9.0e10), (1e9, 9.0e-2)])
def test_cutoff_frequency_table(L0, printed):
    assert two_sig((cutoff_energy(L0) / HBAR) ** 2) == printed


def test_cutoff_one_light_second():
    assert cutoff_energy(C * 1.0) / HBAR == pytest.approx(1.0, rel=1e-15)


def test_cutoff_rejects_nonpositive_length():
    with pytest.raises(DomainError):
        cutoff_energy(0.0)
    with pytest.raises(DomainError):
        cutoff_energy(-1.0)


def test_dimensionless_time_examples():
    lam = cutoff_energy(1e-6)
    assert dimensionless_time(HBAR / lam, lam) == pytest.approx(1.0, rel=1e-15)
    assert dimensionless_time(0.0, lam) == 0.0
    assert dimensionless_time(1.0, cutoff_energy(1e-9)) == pytest.approx(C / 1e-9, rel=1e-12)
    assert two_sig(dimensionless_time(1.0, cutoff_energy(1e-9))) == 3.0e17


def test_params_defaults_and_lambda():
    p = PhysicalParams(m=1e-20, v=1.0, L0=1e-6)
    assert p.Xi == p.L0
    assert p.Lambda == pytest.approx(HBAR * C / 1e-6, rel=1e-15)
    assert p.phi_zz == pytest.approx(2.0 * p.tidal_rate, rel=1e-15)


@pytest.mark.parametrize(
    "bad",
    [dict(m=0.0), dict(m=-1.0), dict(v=0.0), dict(v=C), dict(L0=0.0), dict(T_int=0.0),
     dict(M_N=0.0), dict(R_N=-1.0), dict(eta=-0.1), dict(m=math.inf), dict(Xi=0.0)],
)
def test_params_reject_invalid(bad):
    base = dict(m=1e-20, v=1.0, L0=1e-6)
    base.update(bad)
    with pytest.raises(DomainError):
        PhysicalParams(**base)


def test_replace_resets_default_xi_with_l0():
    p = PhysicalParams(m=1.0, v=1.0, L0=1e-6)
    q = p.replace(L0=2e-6)
    assert q.Xi == 2e-6
    r = PhysicalParams(m=1.0, v=1.0, L0=1e-6, Xi=5e-6).replace(L0=2e-6)
    assert r.Xi == 5e-6


positive = st.floats(min_value=1e-30, max_value=1e30, allow_nan=False, allow_infinity=False)


@given(
    m=positive,
    v=st.floats(min_value=1e-6, max_value=0.999 * C),
    L0=positive,
    Xi=positive,
    eta=st.floats(min_value=0.0, max_value=1e6),
    T_int=positive,
    M_N=positive,
    R_N=positive,
)
def test_internal_round_trip(m, v, L0, Xi, eta, T_int, M_N, R_N):
    p = PhysicalParams(m=m, v=v, L0=L0, Xi=Xi, eta=eta, T_int=T_int, M_N=M_N, R_N=R_N)
    q = from_internal(to_internal(p))
    for name in ("m", "v", "L0", "Xi", "eta", "T_int", "M_N", "R_N"):
        assert getattr(q, name) == pytest.approx(getattr(p, name), rel=1e-12, abs=0.0)
