from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from phigamma.padic import (DivisionByZero, DomainError, PadicScalar, binom, log0, plog,
                            teichmuller)

P = 3
N = 12


def S(x, p=P, prec=N):
    return PadicScalar.from_fraction(p, Fraction(x), prec)


scalars = st.builds(lambda u, v: PadicScalar.from_parts(P, u, v, v + N),
                    st.integers(1, 3**N - 1).filter(lambda u: u % P), st.integers(-3, 3))
principal_units = st.integers(0, 3**(N - 1) - 1).map(lambda m: S(1 + 3 * m))


def test_product_digits():
    x = S(2) * S(5)
    assert x.val == 0 and x.digits()[:3] == [1, 0, 1]


def test_full_cancellation_is_zero():
    assert (S(3) - S(3)).is_zero()


def test_half_digits_mod_3_6():
    # 2 * 365 = 730 = 1 mod 729
    assert S(Fraction(1, 2), prec=6).digits() == [2, 1, 1, 1, 1, 1]


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        S(1) / (S(3) - S(3))


def test_binom_examples():
    assert binom(S(4), 2) == S(6)
    assert binom(S(17), 0) == S(1)
    assert binom(S(1 + 3), 3) == S(4)


def test_plog_examples():
    assert plog(S(1)).is_zero()
    assert plog(S(4)).val == 1
    assert log0(S(4)) == plog(S(4)) / S(3)


def test_plog_partial_sum_oracle():
    prec = 8
    oracle = sum(Fraction((-1) ** (k - 1) * 3**k, k) for k in range(1, 21))
    got = plog(S(4, prec=prec)) - S(oracle, prec=prec + 8)
    assert got.is_zero() or got.val >= prec


def test_plog_domain():
    with pytest.raises(DomainError):
        plog(S(2))


def test_teichmuller_is_root_of_unity():
    w = teichmuller(5, 2, 12)
    assert w ** 4 == S(1, 5)


def test_json_roundtrip():
    x = S(Fraction(7, 9))
    assert PadicScalar.from_json(P, x.to_json()) == x
    assert PadicScalar.from_json(P, PadicScalar.zero(P, 5).to_json()).is_zero()


@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert ((a + b) + c - (a + (b + c))).is_zero()
    assert (a * (b + c) - (a * b + a * c)).is_zero()


@given(scalars, scalars)
def test_valuation_multiplicative(a, b):
    assert (a * b).val == a.val + b.val


@given(st.integers(0, 3**N - 1), st.integers(0, 30), st.sampled_from([3, 5]))
def test_binom_integral(a, k, p):
    b = binom(PadicScalar.from_int(p, a, N), k)
    assert b.is_zero() or b.val >= 0


@given(principal_units, principal_units)
def test_plog_additive(a, b):
    assert (plog(a * b) - plog(a) - plog(b)).is_zero()
