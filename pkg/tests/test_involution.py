from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from etacong.errors import EtacongError, VerificationError
from etacong.etaq import EtaQuotient, expand, named_quotient
from etacong.involution import (
    ALInvolution, GammaElement, calibrate, chain_L0, chain_matrix, chain_transform, check_qneg_identity,
    identity_involution, printed_level, qneg_levels, qneg_rewrite, reduce_to_gamma, verify_transform_table,
    w4, w_levels,
)
from etacong.series import GRID, agree_up_to, negate_q
from etacong.usequence import tilde_L0

Q = GRID


def test_w4_validation():
    w = w4()
    assert w.matrix_ints == (28, 3, 36, 4)
    with pytest.raises(EtacongError, match="N=36"):
        ALInvolution(4, 72)
    with pytest.raises(EtacongError):
        ALInvolution(4, 36, 1, 1, 1, 1)  # determinant 16 - 36


def test_w_levels_examples():
    w = w4()
    assert w_levels({1: 1, 4: 1, 2: 1, 9: 1, 36: 1, 18: 1}, w) == {4: 1, 1: 1, 2: 1, 36: 1, 9: 1, 18: 1}
    assert [w.level(t) for t in (1, 4, 2, 9, 36, 18)] == [4, 1, 2, 36, 9, 18]
    assert w_levels({5: 2}, identity_involution(10)) == {5: 2}
    with pytest.raises(EtacongError):
        w_levels({5: 1}, w)


divs36 = [1, 2, 3, 4, 6, 9, 12, 18, 36]


@given(st.dictionaries(st.sampled_from(divs36), st.integers(-5, 5).filter(bool), max_size=5))
def test_w_levels_involution_and_weight(levels):
    w = w4()
    once = w_levels(levels, w)
    assert sum(once.values()) == sum(levels.values())
    assert w_levels(once, w) == levels


def test_literal_level_fails_example():
    assert printed_level(4, 4) == 4 and w4().level(4) == 1


def test_qneg_rewrite_examples():
    assert qneg_levels({1: 1}) == {2: 3, 1: -1, 4: -1}
    assert qneg_levels({2: 1}) == {2: 1}
    assert check_qneg_identity(Q * 200)


@given(st.dictionaries(st.integers(1, 12), st.integers(-4, 4).filter(bool), max_size=4))
def test_qneg_twice_is_identity(levels):
    assert qneg_levels(qneg_levels(levels)) == levels


def test_qneg_rewrite_matches_series():
    # eta_1^3 eta_3^7 starts at q^1, so q -> -q is defined on its expansion
    q = EtaQuotient.make({1: 3, 3: 7})
    img = qneg_rewrite(q).terms[0]
    T = Q * 200
    lhs = negate_q(expand(q, T))
    rhs = expand(EtaQuotient.make(img.level_map(), 1, q.leading_exponent - img.leading_exponent), T)
    c = lhs.leading_coefficient / rhs.leading_coefficient
    assert agree_up_to(lhs, rhs.scale(c), T)


def test_chain_examples():
    w = w4()
    assert chain_transform(named_quotient("A"), w).terms[0].level_map() == {2: 11, 9: 11, 36: 2, 1: -11, 4: -2, 18: -11}
    assert chain_transform(named_quotient("B"), w).terms[0].level_map() == {2: 2, 9: 1, 1: -1, 18: -2}
    assert chain_transform(named_quotient("t"), w).terms[0].level_map() == named_quotient("ttilde").level_map()


def test_calibrate_examples():
    w = w4()
    a = calibrate(chain_transform(named_quotient("A"), w), named_quotient("Atilde"), 200)
    assert a.calibrated_scalar == 1 and a.calibrated_qshift == 0 and a.verified_to >= Q * 190
    y = calibrate(chain_transform(named_quotient("y"), w), named_quotient("ytilde"), 200)
    assert y.calibrated_scalar == Fraction(-1, 2)
    t = named_quotient("t")
    assert calibrate(t, t, 50).calibrated_scalar == 1
    with pytest.raises(VerificationError):
        calibrate(named_quotient("A"), named_quotient("Atilde"), 10)


def test_gamma_matrix():
    cm = chain_matrix(w4())
    assert [int(x) for row in cm for x in row] == [46, 28, 36, 22]
    g = reduce_to_gamma(cm, 18)
    assert g.entries() == (23, 14, 18, 11)
    with pytest.raises(EtacongError):
        GammaElement(((Fraction(1), Fraction(0)), (Fraction(5), Fraction(1))), 18)


def test_transform_table():
    rep = verify_transform_table(200)
    assert rep.passed and rep.gamma_ok
    assert {r.symbol for r in rep.rows} == {"A", "B", "t", "y", "p0", "p1"}
    assert all(r.qneg_checked for r in rep.rows)
    scalars = {r.symbol: r.scalar for r in rep.rows}
    assert scalars["y"] == Fraction(-1, 2) and scalars["p0"] == 16 and scalars["p1"] == 4
    assert any("gcd(e,t)^2" in n for n in rep.notes)


def test_chain_image_of_L0_matches_prefactor_construction():
    T = Q * 300
    assert agree_up_to(chain_L0(T), tilde_L0(T), T)


def test_chain_images_have_integer_support():
    rep = verify_transform_table(50)
    for r in rep.rows:
        s = expand(EtaQuotient.make(r.levels, r.scalar, r.qshift), Q * 60)
        assert s.has_integer_support()
