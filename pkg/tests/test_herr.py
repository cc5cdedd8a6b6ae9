import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from phigamma.herr import (PHI, PSI, Cochain, DRFrameVector, cup01, cup11, d1, d1psi, d2,
                           differential, dual_exp, exp_class, gamma_K, h2_functional,
                           is_coboundary, lift_independence, lift_residual_ok, lift_solver,
                           pair_dR, tensor, to_psi_complex)
from phigamma.padic import PadicScalar
from phigamma.rankone import RankOneCharacter, RankOneElement, mod_gamma, mod_psi
from phigamma.robba import LaurentWindow, series_mul, t_power

P, N = 3, 12


def W(data):
    return LaurentWindow.from_dict(P, N, -8, 40, data)


def S(x):
    return PadicScalar.from_fraction(P, Fraction(x), N)


def ch(k, alpha=1):
    return RankOneCharacter.make(P, alpha, k)


series = st.dictionaries(st.integers(-2, 12), st.integers(-3**8, 3**8), max_size=5).map(W)


def test_d1_of_zero():
    assert d1(RankOneElement(ch(1), 0, W({}))).is_zero()


@given(st.integers(-1, 2), series, series)
def test_d2_d1_and_comparison(k, f, g):
    x = RankOneElement(ch(k, 4), 0, f)
    assert differential(d1(x)).is_zero()
    assert differential(d1psi(x)).is_zero()
    z = d1(x)
    assert differential(to_psi_complex(z)).is_zero()
    assert (to_psi_complex(z) - d1psi(x)).is_zero()
    y = RankOneElement(ch(k, 4), 0, g)
    c = Cochain(PHI, 1, [x, y])
    assert (to_psi_complex(differential(c)) - differential(to_psi_complex(c))).is_zero()


@given(series, series)
def test_cup_products(f, g):
    x = RankOneElement(ch(1, 4), 0, f)
    u = RankOneElement(ch(0, 7), 0, g)
    z = d1(x)
    one = RankOneElement(ch(0), 0, W({0: 1}))
    assert (cup01(one, z) - z).is_zero()
    cz = cup11(d1(u), z)
    assert (cz - d2(tensor(u, z.entries[0]), tensor(u, z.entries[1]))).is_zero()


def test_lift_solver_trivial_cases():
    zero = lift_solver(DRFrameVector(ch(2), PadicScalar.zero(P)))
    assert zero.is_zero()
    assert lift_solver(DRFrameVector(ch(-1), S(5))).is_zero()


@pytest.mark.parametrize("k", [1, 2])
def test_lift_residuals(k):
    x = DRFrameVector(ch(k, 1 + 3 * k), S(1234))
    xt = lift_solver(x)
    assert all(lift_residual_ok(xt, x, m) for m in (1, 2))
    assert differential(exp_class(x, xt)).is_zero()


def test_exp_class_zero():
    assert exp_class(DRFrameVector(ch(1), PadicScalar.zero(P))).is_zero()


@pytest.mark.parametrize("k", [-1, 0, 1, 2])
def test_lift_independence(k):
    rng = random.Random(k)
    x = DRFrameVector(ch(k, 1 + 3 * rng.randrange(1, 9)), S(rng.randrange(1, 3**12)))
    xt = lift_solver(x)
    if k > 0:
        xt2 = lift_solver(x, shift=-5)
    else:
        # x is regular, so c t^(-k) e is itself a lift
        xt2 = RankOneElement(x.char, 0, series_mul(t_power(P, -k), W({0: x.c})))
    w = lift_independence(x, xt, xt2)
    assert w.degree == 0


def test_fil0_class_is_coboundary():
    x = DRFrameVector(ch(0, 4), S(77))
    assert is_coboundary(exp_class(x), x.char, tshift=0)


def test_pair_dR():
    c = ch(2, 4)
    assert pair_dR(DRFrameVector(c, S(1)), DRFrameVector(c.dual(), S(1))) == S(1)
    assert pair_dR(DRFrameVector(c, S(6)), DRFrameVector(c.dual(), S(5))) == S(30)
    with pytest.raises(ValueError):
        pair_dR(DRFrameVector(c, S(1)), DRFrameVector(c, S(1)))


@pytest.mark.parametrize("k", [-1, 0, 1, 2])
def test_fil0_orthogonality(k):
    c = ch(k)
    x, y = DRFrameVector(c, S(2)), DRFrameVector(c.dual(), S(3))
    # weights k and 1 - k are never both <= 0
    assert not (x.in_fil0 and y.in_fil0)


def test_dual_exp_of_zero():
    c = ch(1)
    zero = RankOneElement(c, 1, W({}))
    assert dual_exp(Cochain(PHI, 1, [zero, zero])).c.is_zero()


def test_h2_functional():
    b1 = ch(1)
    assert h2_functional(RankOneElement(b1, 0, W({-1: 1}))) == S(1)
    g = RankOneElement(b1, 0, W({-2: 3, -1: 4, 0: 1, 5: 2}))
    assert h2_functional(mod_psi(g) - g).is_zero()
    assert h2_functional(mod_gamma(g, gamma_K(P)) - g).is_zero()
    with pytest.raises(ValueError):
        h2_functional(RankOneElement(ch(0), 0, W({-1: 1})))


def test_cochain_json_roundtrip():
    x = RankOneElement(ch(1, 4), 0, W({-1: 2, 3: 1}))
    z = d1psi(x)
    assert (Cochain.from_json(z.to_json()) - z).is_zero()
    assert z.flavor == PSI
