import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from etacong.certify import (
    certify_identity, certify_named, check_invariance, cusp_set, divisors, eta_order_at_cusp, euler_phi,
    quotient_order, self_test, standard_identities, valence_total,
)
from etacong.errors import VerificationError
from etacong.etaq import EtaQuotient, eta_series, named_constant, named_quotient, parse_expression
from etacong.series import GRID


def cusp_count_multiplicative(N: int) -> int:
    total, n, p = 1, N, 2
    while n > 1:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            total *= sum(euler_phi(p ** min(k, a - k)) for k in range(a + 1))
        p += 1
    return total


def test_cusp_counts():
    assert len(cusp_set(1)) == 1 and len(cusp_set(24)) == 8
    for N in range(1, 80):
        assert len(cusp_set(N)) == cusp_count_multiplicative(N)
    assert len(cusp_set(72)) == 16


def test_cusp_representatives_distinct():
    for N in (24, 36, 72):
        seen = {(c.c, c.a % math.gcd(c.c, N // c.c)) for c in cusp_set(N)}
        assert len(seen) == len(cusp_set(N))
        assert all(math.gcd(c.a, c.c) == 1 for c in cusp_set(N))


def test_order_anchor_at_infinity():
    assert eta_order_at_cusp(24, 24, 24) == 1
    for N in (12, 24, 36):
        assert self_test(N)
        for d in divisors(N):
            assert eta_order_at_cusp(d, N, N) == Fraction(eta_series(d, 200 + d).order, GRID)


def test_order_at_zero():
    # width of cusp 0 is N: eta(tau) has order N/24 there
    assert eta_order_at_cusp(1, 1, 24) == 1


def test_invariance_examples():
    rep = check_invariance(named_quotient("t"), 24)
    assert rep.weight == 0 and rep.passed
    rep = check_invariance(EtaQuotient.make({1: 1}), 1)
    assert rep.weight == Fraction(1, 2) and not rep.weight_zero and not rep.passed
    assert check_invariance(named_quotient("A"), 72).weight == 0


@given(st.sampled_from(["t", "y", "p0", "p1", "A", "B", "ttilde", "ytilde", "Atilde", "Btilde"]))
def test_valence_sum_zero(name):
    q = named_quotient(name)
    for N in (36, 72):
        if check_invariance(q, N).passed:
            assert valence_total(q, N) == 0


def test_standard_certificates():
    for name in standard_identities():
        cert = certify_named(name)
        assert cert.verified, (name, cert.detail)
        assert cert.bound >= 1


def test_certificate_monotone():
    lhs, rhs, N = standard_identities()["L0"]
    base = certify_identity(lhs, rhs, N)
    assert certify_identity(lhs, rhs, N, bound=base.bound + 20).verified


def test_negative_control():
    lhs, rhs, N = standard_identities()["L0"]
    cert = certify_identity(lhs, rhs, N, perturb={5: 1})
    assert not cert.verified and cert.mismatch == 5 * GRID


def test_wrong_identity_fails():
    t = named_constant("t")
    cert = certify_identity(named_constant("p0"), (t + 1) ** 3, 12)
    assert not cert.verified


def test_invariance_failure_raises():
    with pytest.raises(VerificationError):
        certify_identity(parse_expression("eta(1)"), parse_expression("eta(1)"), 1)


def test_certificate_json():
    j = certify_named("p1").to_json()
    assert j["verified"] and j["level"] == 12 and "inf" in next(iter(j["cusp_orders"].values()))


def test_quotient_order_linear():
    q = named_quotient("p0")
    for c in divisors(12):
        assert quotient_order(q, c, 12) == sum(r * eta_order_at_cusp(t, c, 12) for t, r in q.levels)
