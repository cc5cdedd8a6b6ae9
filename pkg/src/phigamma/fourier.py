"""Locally analytic functions on Z_p as per-coset Taylor jets, their phi, psi
and Gamma actions, and the Colmez transform of Laurent windows.

A function of level h is stored as, for each a in [0, p^h), the first L
coefficients of y -> f(a + p^h y), plus `tail`: a lower bound for the
valuation of every omitted coefficient (None when they are all zero).
Re-indexing cosets is exact; substitutions y -> q + r y with |q|, |r| <= 1
fold the tail bound into the caps.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .padic import DEFAULT_PREC, DomainError, PadicScalar, ppow, vp_int
from .robba import LaurentWindow

GUARD = 64


def _exact(p: int, x, prec: int = DEFAULT_PREC) -> PadicScalar:
    return PadicScalar.from_fraction(p, Fraction(x), prec + GUARD)


def _recompose(jet: list, q, r, L: int, p: int) -> list:
    """Coefficients of y^i, i < L, in sum_n jet[n] * (q + r y)^n."""
    out = [PadicScalar.zero(p) for _ in range(L)]
    for n, a in enumerate(jet):
        if a.is_exact_zero():
            continue
        # (q + r y)^n = sum_i C(n, i) q^(n-i) r^i y^i
        for i in range(min(n, L - 1) + 1):
            out[i] = out[i] + a * (q ** (n - i)) * (r ** i) * math.comb(n, i)
    return out


def _tail_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LocAnFunction:
    __slots__ = ("p", "h", "L", "cosets", "tail")

    def __init__(self, p: int, h: int, L: int, cosets, tail=None):
        if h < 0 or L < 1:
            raise ValueError("need h >= 0 and L >= 1")
        self.p, self.h, self.L = p, h, L
        n = ppow(p, h)
        data = [list(cosets[a]) if a in cosets else [] for a in range(n)] if isinstance(cosets, dict) \
            else [list(c) for c in cosets]
        if len(data) != n:
            raise ValueError(f"level {h} needs {n} cosets")
        for jet in data:
            if len(jet) > L:
                raise ValueError("jet longer than the Taylor precision")
            jet.extend(PadicScalar.zero(p) for _ in range(L - len(jet)))
        self.cosets = data
        self.tail = tail

    @classmethod
    def zero(cls, p: int, h: int = 2, L: int = 6) -> "LocAnFunction":
        return cls(p, h, L, [[] for _ in range(ppow(p, h))])

    @classmethod
    def from_polynomial(cls, p: int, coeffs, h: int = 2, L: int = 6,
                        prec: int = DEFAULT_PREC) -> "LocAnFunction":
        """x -> sum_k coeffs[k] x^k."""
        cs = [c if isinstance(c, PadicScalar) else _exact(p, c, prec) for c in coeffs]
        out = cls.zero(p, h, L)
        for k, c in enumerate(cs):
            if not c.is_exact_zero():
                out = out + monomial(p, k, h, L, prec).scale(c)
        return out

    # -- comparison -----------------------------------------------------
    def refine(self, h2: int) -> "LocAnFunction":
        """The same function on the cosets of p^h2 Z_p (h2 >= h).  An omitted
        a_n feeds y^i through C(n, i) q^(n-i) p^i, so y^i is capped at tail + i."""
        if h2 < self.h:
            raise ValueError("cannot coarsen a locally analytic function")
        p, L = self.p, self.L
        out = self
        while out.h < h2:
            n = ppow(p, out.h)
            r = _exact(p, p)
            new = []
            for b in range(n * p):
                a, q = b % n, b // n
                # a + p^h (q + p y)
                jet = _recompose(out.cosets[a], _exact(p, q), r, L, p)
                if out.tail is not None:
                    jet = [x.cap(math.floor(out.tail) + i) for i, x in enumerate(jet)]
                new.append(jet)
            out = LocAnFunction(p, out.h + 1, L, new, None if out.tail is None else out.tail + L)
        return out

    def _common(self, other):
        if (self.p, self.L) != (other.p, other.L):
            raise ValueError("mismatched prime or Taylor precision")
        h = max(self.h, other.h)
        return self.refine(h), other.refine(h)

    def __add__(self, other):
        a, b = self._common(other)
        return LocAnFunction(a.p, a.h, a.L, [[x + y for x, y in zip(u, v)] for u, v in zip(a.cosets, b.cosets)],
                             _tail_min(a.tail, b.tail))

    def __neg__(self):
        return LocAnFunction(self.p, self.h, self.L, [[-x for x in u] for u in self.cosets], self.tail)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LocAnFunction":
        if not isinstance(c, PadicScalar):
            c = _exact(self.p, c)
        tail = self.tail
        if tail is not None:
            tail = tail + (c.val if c.val is not None else c.prec or 0)
        return LocAnFunction(self.p, self.h, self.L, [[x * c for x in u] for u in self.cosets], tail)

    def is_zero(self) -> bool:
        return all(x.is_zero() for u in self.cosets for x in u)

    def agrees(self, other) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, LocAnFunction):
            return NotImplemented
        return self.agrees(other)

    __hash__ = None

    def certified_digits(self):
        ps = [x.absprec for u in self.cosets for x in u if x.absprec is not None]
        return min(ps) if ps else None

    def norm_valuation(self):
        """-log_p |f|_h: the least valuation over all jet coefficients."""
        vs = [x.val for u in self.cosets for x in u if x.val is not None]
        return min(vs) if vs else None

    def evaluate(self, x: int) -> PadicScalar:
        """Jet value at an integer point (exact when the jet is the whole
        Taylor series, e.g. for polynomials of degree < L)."""
        n = ppow(self.p, self.h)
        a = x % n
        y = _exact(self.p, (x - a) // n)
        acc = PadicScalar.zero(self.p)
        for k, c in enumerate(self.cosets[a]):
            acc = acc + c * y ** k if k else acc + c
        return acc

    def __repr__(self):
        return f"LocAnFunction(p={self.p}, h={self.h}, L={self.L})"

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        out = {"p": self.p, "h": self.h, "taylorprec": self.L,
               "cosets": {str(a): [c.to_json() for c in u] for a, u in enumerate(self.cosets)}}
        if self.tail is not None:
            out["tail"] = str(self.tail)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "LocAnFunction":
        for key in ("p", "h", "taylorprec", "cosets"):
            if key not in obj:
                raise ValueError(f"locally analytic function needs key {key!r}")
        p, h, L = obj["p"], obj["h"], obj["taylorprec"]
        if not all(isinstance(v, int) for v in (p, h, L)):
            raise ValueError("p, h, taylorprec must be integers")
        cos = {int(a): [PadicScalar.from_json(p, c) for c in u] for a, u in obj["cosets"].items()}
        if set(cos) != set(range(ppow(p, h))):
            raise ValueError(f"need cosets 0..{ppow(p, h) - 1}")
        tail = Fraction(obj["tail"]) if obj.get("tail") is not None else None
        return cls(p, h, L, cos, tail)


# -- actions ------------------------------------------------------------------
def la_phi(f: LocAnFunction) -> LocAnFunction:
    """phi(f)(x) = f(x/p) on pZ_p and 0 on units; the level goes up by one."""
    p = f.p
    n = ppow(p, f.h + 1)
    return LocAnFunction(p, f.h + 1, f.L, [list(f.cosets[b // p]) if b % p == 0 else [] for b in range(n)],
                         f.tail)


def la_psi(f: LocAnFunction) -> LocAnFunction:
    """psi(f)(x) = f(px); the level goes down by one when it can."""
    p = f.p
    if f.h >= 1:
        n = ppow(p, f.h - 1)
        return LocAnFunction(p, f.h - 1, f.L, [list(f.cosets[p * a]) for a in range(n)], f.tail)
    # y -> p y: omitted a_n only reach y^n with n >= L
    return LocAnFunction(p, 0, f.L, [_recompose(f.cosets[0], _exact(p, 0), _exact(p, p), f.L, p)],
                         None if f.tail is None else f.tail + f.L)


def la_gamma(f: LocAnFunction, a) -> LocAnFunction:
    """gamma_a(f)(x) = f(x/a)/a for a unit a."""
    p, h, L = f.p, f.h, f.L
    n = ppow(p, h)
    shifts = []
    if isinstance(a, PadicScalar):
        if a.val != 0:
            raise DomainError("la_gamma needs a unit")
        ainv = PadicScalar.from_int(p, 1, a.absprec + GUARD) / a
        for b in range(n):
            if b == 0:
                shifts.append((0, PadicScalar.zero(p)))
                continue
            ba = ainv * b
            c = ba.lift_int(h) % n
            shifts.append((c, (ba - c) / _exact(p, n)))
    else:
        if a % p == 0:
            raise DomainError("la_gamma needs a unit")
        ainv = _exact(p, Fraction(1, a))
        inv_mod = pow(a, -1, n)
        for b in range(n):
            c = b * inv_mod % n
            # b/a = c + p^h q with q = (b - c a) / (a p^h), a p-adic integer
            shifts.append((c, _exact(p, Fraction(b - c * a, a * n))))
    out = []
    for c, q in shifts:
        jet = [x * ainv for x in _recompose(f.cosets[c], q, ainv, L, p)]
        if f.tail is not None:
            jet = [x.cap(math.floor(f.tail)) for x in jet]
        out.append(jet)
    return LocAnFunction(p, h, L, out, f.tail)


def monomial(p: int, k: int, h: int = 2, L: int = 6, prec: int = DEFAULT_PREC) -> LocAnFunction:
    """x^k, re-centred on each coset: (a + p^h y)^k."""
    if k < 0:
        raise ValueError("monomials need k >= 0")
    n = ppow(p, h)
    out = []
    for a in range(n):
        out.append([_exact(p, math.comb(k, i) * a ** (k - i) * n ** i, prec) for i in range(min(k, L - 1) + 1)])
    # omitted terms carry p^(h i) with i >= L
    return LocAnFunction(p, h, L, out, h * L if k >= L else None)


# -- the Colmez transform -------------------------------------------------------
@lru_cache(maxsize=None)
def _binom_jets(p: int, h: int, j: int, L: int) -> tuple:
    """(jets, tail): per coset a the y-coefficients (i < L) of
    binom(a - 1 + p^h y, j), and the least valuation among the omitted ones."""
    n = ppow(p, h)
    fj = math.factorial(j)
    out = []
    tail = None
    for a in range(n):
        poly = [1]
        for i in range(j):
            c0 = a - 1 - i
            new = [0] * (len(poly) + 1)
            for d, c in enumerate(poly):
                new[d] += c * c0
                new[d + 1] += c * n
            poly = new
        out.append(tuple(Fraction(c, fj) for c in poly[:L]))
        for c in poly[L:]:
            if c:
                v = vp_int(c, p) - _vfact(j, p)
                tail = v if tail is None else min(tail, v)
    return tuple(out), tail


def _vfact(m: int, p: int) -> int:
    v, q = 0, p
    while q <= m:
        v += m // q
        q *= p
    return v


def _tail_cap(f: LaurentWindow, h: int):
    """Lower bound for the jets contributed by the unknown degrees below the
    window.  Uses |binom(x, j)|_h <= |floor(j/p^h)!|^(-1)."""
    p = f.p
    v0, s = f.lo
    slope = Fraction(1, ppow(p, h) * (p - 1))
    if s <= slope:
        raise DomainError("negative tail decays too slowly for this level")
    J0 = -f.dmin  # first missing degree -1-j has j = J0
    best = None
    j = J0
    while True:
        # lo tail at degree m = -1-j
        v = v0 + s * (j - J0) - _vfact(j // ppow(p, h), p)
        if best is None or v < best:
            best = v
        # beyond this j the linear bound v0 + (s - slope)(j - J0) - J0 * slope already exceeds best
        if v0 + (s - slope) * (j - J0) - slope * J0 > best:
            break
        j += 1
    return math.floor(best)


def colmez(f: LaurentWindow, h: int = 2, L: int = 6) -> LocAnFunction:
    """Col(f)(x) = sum_{m <= -1} f_m binom(x - 1, -1 - m).  Only the strictly
    negative part of f contributes."""
    p = f.p
    n = ppow(p, h)
    acc = [[PadicScalar.zero(p) for _ in range(L)] for _ in range(n)]
    tail = None
    for m, c in sorted(f.coeffs.items()):
        if m >= 0 or c.is_exact_zero():
            continue
        jets, jt = _binom_jets(p, h, -1 - m, L)
        if jt is not None:
            tail = _tail_min(tail, jt + (c.val if c.val is not None else c.prec))
        for a in range(n):
            row = acc[a]
            for i, q in enumerate(jets[a]):
                if q:
                    row[i] = row[i] + c * _exact(p, q, f.prec)
    if f.lo is not None:
        cap = _tail_cap(f, h)
        acc = [[x.cap(cap) for x in row] for row in acc]
        tail = _tail_min(tail, cap)
    return LocAnFunction(p, h, L, acc, tail)


def col_preimage(coeffs, p: int, prec: int = DEFAULT_PREC, dmin: int = -8,
                 dmax: int = 40) -> LaurentWindow:
    """A Laurent polynomial sum_j c_j T^(-1-j) whose Colmez transform is the
    polynomial x -> sum_k coeffs[k] x^k.  The c_j are the forward differences
    at x = 1 (binomial triangularity)."""
    cs = [c if isinstance(c, PadicScalar) else _exact(p, c, prec) for c in coeffs]
    deg = len(cs) - 1
    if -1 - deg < dmin:
        raise ValueError(f"degree {deg} needs dmin <= {-1 - deg}")

    def P(x: int) -> PadicScalar:
        acc = PadicScalar.zero(p)
        for k, c in enumerate(cs):
            acc = acc + c * x ** k
        return acc

    vals = [P(1 + i) for i in range(deg + 1)]
    out = {}
    for j in range(deg + 1):
        out[-1 - j] = vals[0]
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return LaurentWindow(p, prec, dmin, dmax, out)
