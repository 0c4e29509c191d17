import random

from hypothesis import given, strategies as st

from etacong._kernels import inverse_unit, mul_kronecker, mul_schoolbook, mul_trunc

ints = st.lists(st.integers(-10**30, 10**30), min_size=1, max_size=120)


@given(ints, ints, st.integers(1, 260))
def test_kronecker_matches_schoolbook(a, b, n):
    assert mul_kronecker(a, b, n) == mul_schoolbook(a, b, n)


@given(ints, ints, st.integers(1, 260))
def test_dispatch_matches_schoolbook(a, b, n):
    assert mul_trunc(a, b, n) == mul_schoolbook(a, b, n)


def test_kronecker_large_dense_and_sparse():
    rng = random.Random(7)
    for size in (300, 1200):
        a = [rng.randint(-10**50, 10**50) for _ in range(size)]
        b = [rng.choice([0, 0, 0, rng.randint(-5, 5)]) for _ in range(size)]
        assert mul_trunc(a, b, size) == mul_schoolbook(a, b, size)
        assert mul_kronecker(a, a, size) == mul_schoolbook(a, a, size)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=60), st.sampled_from([1, -1]), st.integers(1, 300))
def test_inverse_unit_roundtrip(tail, lead, n):
    a = [lead] + tail
    inv = inverse_unit(a, n)
    assert mul_schoolbook(a, inv, n) == [1] + [0] * (n - 1)


def test_inverse_newton_path():
    # dense input over a long window exercises the Newton branch
    rng = random.Random(3)
    a = [1] + [rng.randint(-3, 3) for _ in range(3000)]
    n = 3000
    assert mul_trunc(a, inverse_unit(a, n), n) == [1] + [0] * (n - 1)
