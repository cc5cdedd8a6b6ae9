import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from phigamma.fourier import (LocAnFunction, col_preimage, colmez, la_gamma, la_phi, la_psi,
                              monomial)
from phigamma.padic import PadicScalar
from phigamma.robba import LaurentWindow, gamma, phi, psi

N = 12


def W(p, data):
    return LaurentWindow.from_dict(p, N, -8, 40, data)


negative = st.dictionaries(st.integers(-6, -1), st.integers(-50, 50).filter(bool), min_size=1, max_size=4)


def test_monomial_examples():
    p, h = 3, 2
    assert monomial(p, 0).agrees(LocAnFunction.from_polynomial(p, [1]))
    m1, m2 = monomial(p, 1), monomial(p, 2)
    for a in range(9):
        assert m1.cosets[a][0] == PadicScalar.from_int(p, a, N) or a == 0
        assert m1.cosets[a][1] == PadicScalar.from_int(p, 9, N)
        assert m2.cosets[a][2] == PadicScalar.from_int(p, 81, N)
        if a:
            assert m2.cosets[a][1] == PadicScalar.from_int(p, 18 * a, N)


@pytest.mark.parametrize("p", [3, 5])
def test_colmez_examples(p):
    assert colmez(W(p, {0: 1, 3: 5})).is_zero()
    assert colmez(W(p, {-1: 1})).agrees(monomial(p, 0))
    assert colmez(W(p, {-2: 1})).agrees(monomial(p, 1) - monomial(p, 0))


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("k", range(11))
def test_eigenrelations(p, k):
    m = monomial(p, k)
    assert la_psi(m).agrees(m.scale(p**k))
    for a in (2, 7):
        c = PadicScalar.from_fraction(p, Fraction(1, a ** (k + 1)), N + 64)
        assert la_gamma(m, a).agrees(m.scale(c))


@given(negative)
def test_psi_phi_identity(data):
    F = colmez(W(3, data))
    assert la_psi(la_phi(F)).agrees(F)
    assert not F.is_zero()


@given(negative, st.sampled_from([2, 4, 5]))
def test_equivariance(data, a):
    f = W(3, data)
    F = colmez(f)
    assert colmez(phi(f), 3).agrees(la_phi(F))
    assert colmez(psi(f), 1).agrees(la_psi(F))
    assert colmez(gamma(f, a)).agrees(la_gamma(F, a))


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=4))
def test_preimage(poly):
    assert colmez(col_preimage(poly, 3)).agrees(LocAnFunction.from_polynomial(3, poly))


def test_json_roundtrip():
    F = colmez(W(3, {-3: 2, -1: 1}))
    assert LocAnFunction.from_json(F.to_json()).agrees(F)
