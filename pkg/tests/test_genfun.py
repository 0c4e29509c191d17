import pytest

from etacong.errors import EtacongError, InsufficientPrecisionError
from etacong.genfun import (
    coefficient, cphi6_theta, cpsi60_eta, cpsi60_theta, f6_zeta_oracle, h_series,
)
from etacong.series import GRID, Series, agree_up_to, extract_progression, val3_min

Q = GRID


def test_spot_values():
    psi, phi = cpsi60_eta(Q * 10), cphi6_theta(Q * 10)
    assert coefficient(psi, 0) == 20 and coefficient(phi, 0) == 1
    assert coefficient(phi, 1) == 36
    assert coefficient(psi, 1) % 9 == 0 and coefficient(phi, 1) % 9 == 0
    assert coefficient(cpsi60_theta(Q * 10), 0) == 20
    assert coefficient(Series.from_q_coeffs([1, 2]), 1) == 2


def test_cphi6_single_column_count():
    # (0;0) with one of 6 colours on each row: 6 * 6 symbols of weight 1
    assert cphi6_theta(Q * 3).q(1) == 6 * 6


def test_integer_support_and_nonnegativity():
    for s in (cpsi60_eta(Q * 500), cphi6_theta(Q * 500)):
        assert s.has_integer_support() and s.is_integral()
        assert all(c >= 0 for c in s.coeffs)


def test_dual_formula_500():
    T = Q * 501
    assert agree_up_to(cpsi60_eta(T), cpsi60_theta(T), T)


def test_h21_leading_term():
    h = h_series(Q * 4)["h21"]
    assert (h.order, h.leading_coefficient) == (9, 4)  # 4 q^(3/8)


def test_progression_mod_9():
    psi = cpsi60_eta(Q * (3 * 301 + 2))
    prog = extract_progression(psi, 3, 1)
    assert val3_min(prog, 0, Q * 300) >= 2


def test_oracle_slices():
    T = Q * 101
    z = f6_zeta_oracle(T)
    assert agree_up_to(z.slice(3), cphi6_theta(T), T)
    assert agree_up_to(z.slice(0), cpsi60_eta(T), T)
    for a in range(1, 7):
        assert z.slice(a) == z.slice(-a)
    assert z.phase in (1, -1)
    assert z.slice(7).is_zero()


def test_oracle_errors():
    with pytest.raises(EtacongError):
        f6_zeta_oracle(Q * 10, J=5)
    with pytest.raises(InsufficientPrecisionError):
        f6_zeta_oracle(Q)
    with pytest.raises(InsufficientPrecisionError):
        cpsi60_eta(10)


def test_oracle_calibration_failure():
    bogus = Series.from_q_coeffs([1, 35, 0])
    with pytest.raises(EtacongError):
        f6_zeta_oracle(Q * 10, calibrate_against=bogus)
