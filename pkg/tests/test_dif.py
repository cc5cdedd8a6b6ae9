from fractions import Fraction

from hypothesis import given, strategies as st

from phigamma.cyclotomic import field
from phigamma.dif import DifElement, dif_gamma, iota, t_project, teval_zero
from phigamma.padic import PadicScalar
from phigamma.robba import LaurentWindow, gamma, phi, psi, series_mul, t_series

P, N, L = 3, 12, 8


def W(data, p=P):
    return LaurentWindow.from_dict(p, N, -8, 40, data)


def S(x, p=P):
    return PadicScalar.from_fraction(p, Fraction(x), N)


windows = st.dictionaries(st.integers(-2, 13), st.integers(-3**10, 3**10), min_size=1, max_size=6).map(W)


def test_iota_one():
    for n in (1, 2):
        assert teval_zero(iota(W({0: 1}), n, L)) == field(P, n).one()
        assert all(iota(W({0: 1}), n, L).coeff(e).is_zero() for e in range(1, L + 1))


def test_iota_T_constant_term():
    for n in (1, 2):
        fld = field(P, n)
        assert teval_zero(iota(W({1: 1}), n, L)) == fld.zeta() - fld.one()


def test_iota_of_t():
    for n in (1, 2):
        d = iota(t_series(P), n, L)
        want = DifElement.t_power(P, n, 1, L).scale(S(Fraction(1, P**n)))
        assert d.agrees(want, 2)


def test_dif_gamma_examples():
    one = DifElement.constant(field(P, 2).one(), L)
    assert dif_gamma(one, 4) == one
    t = DifElement.t_power(P, 2, 1, L)
    assert dif_gamma(t, 4) == t.scale(S(4))


def test_teval_zero_ignores_t_terms():
    x = iota(W({1: 1, 3: 2}), 1, L)
    y = DifElement.t_power(P, 1, 1, L) * iota(W({2: 5}), 1, L)
    assert teval_zero(x + y) == teval_zero(x)


def test_t_project_examples():
    assert t_project(field(P, 2).one(), 0) == field(P, 0).one()
    z = field(P, 2).zeta()
    assert t_project(z, 0) == z.trace_to(0).scale(S(Fraction(1, 6)))
    a = field(P, 1).element([S(2), S(7)])
    assert t_project(a.embed_up(), 1) == a


@given(windows, st.sampled_from([1, 2]))
def test_diagram_phi(f, n):
    a = iota(phi(f), n + 1, L)
    b = iota(f, n, L).embed_up()
    assert a.agrees(b, 2)


@given(windows, st.sampled_from([1, 2]))
def test_diagram_psi(f, n):
    a = iota(psi(f), n, L)
    b = iota(f, n + 1, L).normalized_trace()
    assert a.agrees(b, 2)


@given(windows, windows)
def test_iota_multiplicative(f, g):
    assert iota(series_mul(f, g), 1, L).agrees(iota(f, 1, L) * iota(g, 1, L), 2)


@given(windows, st.sampled_from([2, 4, 5, 7]))
def test_iota_gamma_equivariant(f, a):
    assert iota(gamma(f, a), 2, L).agrees(dif_gamma(iota(f, 2, L), a), 2)
