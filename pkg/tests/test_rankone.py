import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from phigamma.padic import PadicScalar
from phigamma.rankone import (HTooSmall, NotPsiFixed, RankOneCharacter, RankOneElement,
                              T_L_project, big_exp, cyclotomic_fixture, is_psi_fixed,
                              log_chi_gamma_n, m_of_level, mod_nabla, mod_phi, mod_psi,
                              nabla_chain, nrig_check, random_psi_fixed, tilde_partial)
from phigamma.robba import LaurentWindow, series_mul, t_power

P, N = 3, 12


def W(data):
    return LaurentWindow.from_dict(P, N, -8, 40, data)


def S(x):
    return PadicScalar.from_fraction(P, Fraction(x), N)


def ch(k, alpha=1):
    return RankOneCharacter.make(P, alpha, k)


def test_mod_psi_of_e():
    e = RankOneElement(ch(0), 0, W({0: 1}))
    assert mod_psi(e) == e


def test_mod_phi_of_inverse_t():
    x = RankOneElement(ch(0), 1, W({0: 1}))
    assert mod_phi(x) == x.scale(S(Fraction(1, 3)))


def test_mod_psi_of_t_times_fixture():
    g = series_mul(t_power(P, 1), cyclotomic_fixture(P))
    x = RankOneElement(ch(0), 0, g)
    assert mod_psi(x) == x.scale(S(Fraction(1, 3)))


def test_nrig_examples():
    for k in (1, 2):
        assert nrig_check(RankOneElement(ch(k), k, W({0: 1})))
        assert not nrig_check(RankOneElement(ch(k), k + 1, W({0: 1})))
    assert nrig_check(RankOneElement(ch(2), 0, W({-3: 1, 4: 2})))


def test_fixture_nabla_chain_constant():
    # oracle: ((1+T)/T)(1 - t/T) with t = log(1+T), expanded by sympy
    T = sympy.symbols("T")
    ser = sympy.series((1 + T) / T * (1 - sympy.log(1 + T) / T), T, 0, 3).removeO()
    assert ser.coeff(T, 0) == sympy.Rational(1, 2)
    x = RankOneElement(ch(1), 0, cyclotomic_fixture(P))
    assert is_psi_fixed(x) and nrig_check(x)
    y = nabla_chain(x, 1)
    assert y.tshift == 0 and y.f.coeff(0) == S(Fraction(1, 2))
    assert y.f.coeff(1) == S(Fraction(str(ser.coeff(T, 1))))


def test_nabla_chain_of_e():
    e = RankOneElement(ch(1), 0, W({0: 1}))
    assert nabla_chain(e, 1) == e


def test_nabla_chain_h_too_small():
    with pytest.raises(HTooSmall):
        nabla_chain(RankOneElement(ch(2), 2, W({0: 1})), 1)


def test_big_exp_zero_and_not_psi_fixed():
    z = RankOneElement(ch(1), 0, W({}))
    assert big_exp(z, 1).y.is_zero()
    with pytest.raises(NotPsiFixed):
        big_exp(RankOneElement(ch(1), 0, W({1: 1})), 1)


def test_tilde_partial_kills_invariant_line():
    x = RankOneElement(ch(2), 2, W({0: 5}))
    assert tilde_partial(x).is_zero()


def test_T_L_of_e():
    e = RankOneElement(ch(0), 0, W({0: 1}))
    assert T_L_project(e, 1).coords[0] == S(1)
    assert all(c.is_zero() for c in T_L_project(e, 1).coords[1:])


def test_T_L_independent_of_m():
    x = RankOneElement(ch(0), 0, cyclotomic_fixture(P))
    a, b = T_L_project(x, 1, m=1), T_L_project(x, 1, m=2)
    d = a - b
    assert all(c.is_zero() or c.val >= min(a.absprec(), b.absprec()) - 2 for c in d.coords)


def test_m_of_level():
    for n in (1, 2, 3):
        assert m_of_level(P, n) == log_chi_gamma_n(P, n).val == n


@pytest.mark.parametrize("k", [0, 1, 2])
def test_exp_step_and_psi_preserved(k):
    x = random_psi_fixed(ch(k), random.Random(k))
    h = max(1, k)
    y = big_exp(x, h).y
    assert is_psi_fixed(y)
    assert big_exp(x, h + 1).y == mod_nabla(y, h)
    assert is_psi_fixed(tilde_partial(x).with_shift(max(0, k - 1)))


@given(st.integers(0, 2), st.dictionaries(st.integers(-2, 10), st.integers(-3**8, 3**8), max_size=5))
def test_nabla_chain_lands_in_D(k, data):
    x = RankOneElement(ch(k), k, W(data))
    for h in (max(1, k), max(1, k) + 1):
        assert nabla_chain(x, h).tshift == 0


@given(st.integers(-1, 2), st.dictionaries(st.integers(-2, 10), st.integers(-3**8, 3**8), max_size=5))
def test_json_roundtrip(k, data):
    x = RankOneElement(ch(k, 4), k, W(data))
    assert RankOneElement.from_json(x.to_json()) == x
