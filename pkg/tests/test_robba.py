from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from phigamma.padic import PadicScalar
from phigamma.rankone import cyclotomic_fixture
from phigamma.robba import (LaurentWindow, NotInvertible, gamma, nabla, partial, phi, psi,
                            res, reslog, series_invert, series_mul, t_over_T_inverse, t_series)

P, N = 3, 12


def W(data, p=P, dmin=-8, dmax=40):
    return LaurentWindow.from_dict(p, N, dmin, dmax, data)


def S(x, p=P):
    return PadicScalar.from_fraction(p, Fraction(x), N)


def same(a, b):
    return (a - b).is_zero()


windows = st.dictionaries(st.integers(-4, 12), st.integers(-3**10, 3**10), max_size=8).map(W)


def test_T_times_inverse():
    assert same(series_mul(W({1: 1}), W({-1: 1})), W({0: 1}))


def test_geometric_series():
    g = series_invert(W({0: 1, 1: -1}, dmin=0))
    assert all(g.coeff(d) == S(1) for d in range(0, 30))


def test_T_over_t():
    # oracle: x / log(1 + x) expanded by sympy
    x = sympy.symbols("x")
    ser = sympy.series(x / sympy.log(1 + x), x, 0, 8).removeO()
    want = [Fraction(str(ser.coeff(x, k))) for k in range(8)]
    assert want[:2] == [1, Fraction(1, 2)]
    g = t_over_T_inverse(P)
    for k, c in enumerate(want):
        assert g.coeff(k) == S(c)


def test_invert_zero_raises():
    with pytest.raises(NotInvertible):
        series_invert(W({}))


def test_phi_examples():
    assert same(phi(W({1: 1})), W({1: 3, 2: 3, 3: 1}))
    assert same(phi(W({0: 1})), W({0: 1}))
    t = t_series(P)
    assert same(phi(t), t.scale(S(3)))


def test_gamma_examples():
    assert same(gamma(W({1: 1}), 4), W({1: 4, 2: 6, 3: 4, 4: 1}))
    f = W({-2: 5, 0: 1, 3: 7})
    assert same(gamma(f, 1), f)


def test_psi_examples():
    assert same(psi(W({0: 1})), W({0: 1}))
    g = cyclotomic_fixture(P)
    assert same(psi(g), g)


def test_partial_examples():
    assert same(partial(W({1: 1})), W({0: 1, 1: 1}))
    assert same(partial(t_series(P)), W({0: 1}))


def test_nabla_examples():
    t = t_series(P)
    assert same(nabla(t, 0), t)
    assert nabla(t, 1).is_zero()
    f = W({1: 1}, dmin=-2, dmax=20)
    assert same(nabla(f, 0, mode="series"), nabla(f, 0))


def test_residues():
    assert res(W({-1: 1})) == S(1)
    assert res(W({0: 4, 5: 1})).is_zero()
    assert reslog(cyclotomic_fixture(P)) == S(1)


def test_json_roundtrip():
    f = W({-3: 2, 0: Fraction(1, 3), 7: 5})
    assert same(LaurentWindow.from_json(f.to_json()), f)


@given(windows)
def test_psi_phi_identity(f):
    assert same(psi(phi(f)), f)


@given(windows, st.sampled_from([2, 4, 5, 7]))
def test_gamma_commutes_with_phi(f, a):
    assert same(gamma(phi(f), a), phi(gamma(f, a)))


@given(windows, st.sampled_from([2, 4]), st.sampled_from([5, 7]))
def test_gamma_group_law(f, a, b):
    assert same(gamma(gamma(f, a), b), gamma(f, a * b))


@given(windows)
def test_partial_phi(f):
    assert same(partial(phi(f)), phi(partial(f)).scale(S(3)))


@given(windows, st.sampled_from([2, 4, 5]))
def test_partial_gamma(f, a):
    assert same(partial(gamma(f, a)), gamma(partial(f), a).scale(S(a)))


@given(windows, st.sampled_from([2, 4, 5]))
def test_reslog_invariance(f, a):
    assert reslog(psi(f) - f).is_zero()
    assert reslog(gamma(f, a).scale(S(a)) - f).is_zero()
