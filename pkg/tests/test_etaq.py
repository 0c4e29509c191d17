from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import partitions
from etacong.errors import EtacongError
from etacong.etaq import (
    EtaExpression, EtaQuotient, ParseError, PochhammerFactor, ThetaIndex, eta_series, expand,
    format_expression, named_constant, named_quotient, parse_expression, phi_psi_series,
    pochhammer_product, pochhammer_series, registry_names, theta_series,
)
from etacong.series import GRID, Series, agree_up_to

Q = GRID


def pentagonal_oracle(n_max: int) -> list[int]:
    c = [0] * (n_max + 1)
    k = 0
    while True:
        done = True
        for kk in ({k, -k} if k else {0}):
            e = kk * (3 * kk - 1) // 2
            if e <= n_max:
                c[e] += (-1) ** (kk % 2)
                done = False
        if done and k:
            break
        k += 1
    return c


def test_euler_pentagonal():
    s = pochhammer_series(PochhammerFactor(1, Q, Q), Q * 200)
    assert s.q_coeffs(0, 200) == pentagonal_oracle(199)


def test_euler_odd_distinct():
    # (-q;q) (q;q^2) = 1
    lhs = pochhammer_product([PochhammerFactor(-1, Q, Q), PochhammerFactor(1, Q, 2 * Q)], Q * 150)
    assert lhs == Series.one(Q * 150)


def test_pochhammer_exponent_zero():
    assert pochhammer_series(PochhammerFactor(1, 24, 48, 0), 100) == Series.one(100)


@given(st.sampled_from([1, -1]), st.integers(1, 4), st.integers(1, 4), st.integers(-3, 3))
def test_pochhammer_fast_path_equals_general(sign, a, b, e):
    p = PochhammerFactor(sign, Q * a, Q * b, e)
    T = Q * 80
    assert pochhammer_series(p, T) == pochhammer_series(p, T, general=True)


def test_eta_series_examples():
    e1 = eta_series(1, Q * 100 + 1)
    lead = list(e1.items())[:2]
    assert lead == [(1, 1), (25, -1)]
    assert all(c in (-1, 0, 1) for c in e1.coeffs)
    e2 = list(eta_series(2, 200).items())[:2]
    assert e2 == [(2, 1), (50, -1)]


def test_eta_inverse_partitions():
    s = expand(parse_expression("eta(1)^-1"), Q * 80)
    assert [s[Q * n - 1] for n in range(80)] == partitions(79)


def test_leading_terms_of_displayed_quotients():
    for name, order, lead in (("A", -3, 1), ("L0", -1, 1), ("t", 1, 1), ("y", 0, 1)):
        s = expand(named_constant(name), Q * 20)
        assert (s.order, s.leading_coefficient) == (Q * order, lead), name


def test_registry_transcriptions():
    t = named_quotient("t")
    assert t.level_map() == {12: 4, 2: 2, 6: -2, 4: -4} and t.scalar == 1
    yt = named_quotient("ytilde")
    assert yt.scalar == Fraction(-1, 2)
    assert yt.level_map() == {12: 1, 3: 2, 2: 9, 6: -3, 4: -3, 1: -6}
    L0 = named_constant("L0")
    assert len(L0.terms) == 3
    assert any(q.levels == () and q.scalar == 24 for q in L0.terms)
    assert all(q.qshift == -12 for q in named_constant("cpsi60").terms)
    assert "Atilde" in registry_names()
    with pytest.raises(KeyError):
        named_constant("nope")


def test_theta_examples():
    t10 = theta_series(ThetaIndex(1, 0), Q * 30)
    assert dict(t10.items()) == {0: 1, Q: 2, 4 * Q: 2, 9 * Q: 2, 16 * Q: 2, 25 * Q: 2}
    t11 = theta_series(ThetaIndex(1, 1), Q * 30)
    assert list(t11.items())[:3] == [(6, 2), (6 + 2 * Q, 2), (6 + 6 * Q, 2)]
    t22 = theta_series(ThetaIndex(2, 2), Q * 10)
    assert list(t22.items())[:2] == [(12, 2), (9 * 12, 2)]
    with pytest.raises(EtacongError):
        theta_series(ThetaIndex(5, 1), 100)


def test_phi_psi_products():
    T = Q * 400
    phi, psi = phi_psi_series("phi", T), phi_psi_series("psi", T)
    assert phi == theta_series(ThetaIndex(1, 0), T)
    tri = Series.from_terms({Q * n * (n + 1) // 2: 1 for n in range(40)}, T)
    assert psi == tri and psi.q(0) == 1


def test_jacobi_triple_product_forms():
    T = Q * 500
    pairs = [
        (ThetaIndex(1, 0), "eta(2)^5 * eta(1)^-2 * eta(4)^-2"),
        (ThetaIndex(1, 1), "2 * eta(4)^2 * eta(2)^-1"),
        (ThetaIndex(2, 1), "eta(2)^2 * eta(1)^-1"),
    ]
    for idx, text in pairs:
        th = theta_series(idx, T)
        et = expand(parse_expression(text), T)
        assert agree_up_to(th, et, T), text


def test_eq_21_series():
    T = Q * 400
    t = expand(named_constant("t"), T + Q)
    rhs = t.invert() + t * t * 9 + t * 3 + 27
    assert agree_up_to(expand(named_constant("L0"), T), rhs, T - Q)


def test_p_identities_series():
    T = Q * 300
    one = Series.one(T)
    for plain, tp, k in (("p0", "t", 4), ("p1", "t", 2), ("p0tilde", "ttilde", 4), ("p1tilde", "ttilde", 2)):
        lhs = expand(named_constant(plain), T)
        assert agree_up_to(lhs, (one + expand(named_constant(tp), T)) ** k, T), plain


def test_two_ytilde_integral():
    y = expand(named_constant("ytilde"), Q * 600)
    assert y.denominator == 2
    assert (y * 2).is_integral()


@st.composite
def quotients(draw):
    levels = draw(st.dictionaries(st.integers(1, 12), st.integers(-4, 4), max_size=4))
    scalar = draw(st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda c: c != 0))
    shift = draw(st.integers(-30, 30))
    return EtaQuotient.make({t: r for t, r in levels.items() if r}, scalar, shift)


@given(quotients())
def test_intrinsic_leading_exponent(q):
    s = expand(q, q.leading_exponent + Q * 6)
    assert s.order == q.leading_exponent
    assert s.leading_coefficient == q.scalar


@given(st.lists(quotients(), min_size=1, max_size=3))
def test_format_parse_roundtrip(qs_):
    e = EtaExpression(tuple(qs_)).collect()
    assert parse_expression(format_expression(e)) == e


def test_parse_errors_and_names():
    assert parse_expression("A") == named_constant("A")
    assert parse_expression("2 * q^(1/2) * eta(3)").terms[0].qshift == 12
    for bad in ("eta(1", "q^(1/48)", "eta(2)^(1/2)", "3 +"):
        with pytest.raises(ParseError):
            parse_expression(bad)


def test_expression_algebra():
    t = named_constant("t")
    e = (t + 1) ** 2
    T = Q * 50
    ts = expand(t, T)
    assert agree_up_to(expand(e, T), (ts + 1) ** 2, T)
    assert expand(t - t, T).is_zero()
