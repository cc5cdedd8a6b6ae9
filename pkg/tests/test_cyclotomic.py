import sympy
from fractions import Fraction
from hypothesis import given, strategies as st

from phigamma.cyclotomic import field
from phigamma.padic import PadicScalar

P, N = 3, 12


def S(x, p=P):
    return PadicScalar.from_fraction(p, Fraction(x), N)


def elt(n, ints, p=P):
    fld = field(p, n)
    return fld.element([S(c, p) for c in ints[:fld.d]] + [S(0, p)] * (fld.d - len(ints[:fld.d])))


coords = st.lists(st.integers(-3**8, 3**8), min_size=6, max_size=6)


def test_degrees():
    assert [field(3, n).d for n in (0, 1, 2, 3)] == [1, 2, 6, 18]


def test_zeta_squared():
    z = field(3, 1).zeta()
    assert z * z == elt(1, [-1, -1])


def test_inverse_of_zeta_minus_one():
    # oracle: extended gcd of X - 1 and X^2 + X + 1 over Q
    X = sympy.symbols("X")
    inv = sympy.Poly(sympy.invert(X - 1, X**2 + X + 1), X).all_coeffs()[::-1]
    fld = field(3, 1)
    got = (fld.zeta() - fld.one()).inverse()
    want = elt(1, [Fraction(str(c)) for c in inv])
    assert got == want == elt(1, [Fraction(-2, 3), Fraction(-1, 3)])


def test_embed_up_zeta():
    assert field(3, 1).zeta().embed_up() == field(3, 2).zeta() ** 3
    assert field(3, 1).one().embed_up() == field(3, 2).one()


def test_galois_examples():
    z = field(3, 1).zeta()
    assert z.galois(2) == elt(1, [-1, -1])
    a = elt(2, [1, 2, 3, 4, 5, 6])
    assert a.galois(1) == a


def test_trace_examples():
    assert field(3, 2).one().trace_down() == elt(1, [3])
    assert field(3, 1).zeta().trace_down() == elt(0, [-1])


def test_normalized_traces_differ_at_the_bottom():
    one = field(3, 1).one()
    assert one.normalized_trace() == elt(0, [Fraction(2, 3)])
    assert one.project_to(0) == elt(0, [1])


@given(coords, coords)
def test_embed_up_additive(a, b):
    x, y = elt(1, a), elt(1, b)
    assert (x + y).embed_up() == x.embed_up() + y.embed_up()


@given(coords, st.sampled_from([2, 4, 5, 7, 8]), st.sampled_from([2, 4, 5, 7, 8]))
def test_galois_group_action(a, c, c2):
    x = elt(2, a)
    assert x.galois(c).galois(c2) == x.galois(c * c2 % 9)


@given(coords, coords, st.sampled_from([2, 4, 5, 7, 8]))
def test_galois_ring_hom(a, b, c):
    x, y = elt(2, a), elt(2, b)
    assert (x * y).galois(c) == x.galois(c) * y.galois(c)
    assert (x + y).galois(c) == x.galois(c) + y.galois(c)


@given(coords)
def test_trace_of_embed(a):
    x = elt(1, a)
    assert x.embed_up().trace_down() == x.scale(S(3))


@given(coords, st.sampled_from([4, 7]))
def test_trace_invariance(a, c):
    x = elt(2, a)
    assert x.galois(c).trace_down() == x.trace_down()


@given(coords)
def test_full_galois_sum_rational(a):
    x = elt(2, a)
    tot = x
    for c in (2, 4, 5, 7, 8):
        tot = tot + x.galois(c)
    assert all(t.is_zero() for t in tot.coords[1:])
