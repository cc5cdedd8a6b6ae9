"""Truncated Laurent series in T with certified tails.

A window holds exact-up-to-precision coefficients on [dmin, dmax].  What
lies outside is described by two bounds:

* ``hi = (v0, kappa)``: every coefficient at degree m > dmax has valuation
  at least ``v0 - kappa * floor(log_p m)``.  ``None`` means exactly zero.
* ``lo = (v0, s)`` (Fractions): every coefficient at degree m < dmin has
  valuation at least ``v0 + s * (dmin - 1 - m)``.  ``None`` means zero.

Operators fold whatever the window cannot hold into these bounds and cap
in-window coefficients they may contaminate, so every digit a coefficient
carries is a certified digit.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .cyclotomic import field
from .padic import (DEFAULT_PREC, DomainError, PadicError, PadicScalar,
                    binom, ilog, plog, ppow, vp_int)


class WindowExhausted(PadicError):
    pass


class NotInvertible(PadicError):
    pass


class NotInPhiImage(PadicError):
    pass


MIN_DEGREE = -1200
# hi-tail bound used when nothing better is known (series inversion of a
# non-integral series); keeps caps honest at the cost of certifying nothing
UNKNOWN_TAIL = -(10**6)
_GUARD = 24


def vbound(c: PadicScalar):
    """Lower bound on the valuation; None for an exact zero."""
    if c.val is not None:
        return c.val
    return c.prec


def _ceil(x) -> int:
    return math.ceil(x)


def _lo_at(lo, dmin, m):
    v0, s = lo
    return v0 + s * (dmin - 1 - m)


def _lo_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (min(a[0], b[0]), min(a[1], b[1]))


def _hi_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (min(a[0], b[0]), max(a[1], b[1]))


def _scan_min(fn, start: int, span: int) -> Fraction:
    best = None
    for m in range(start, start + span):
        v = fn(m)
        if best is None or v < best:
            best = v
    return best


class LaurentWindow:
    __slots__ = ("p", "prec", "dmin", "dmax", "coeffs", "hi", "lo")

    def __init__(self, p: int, prec: int, dmin: int, dmax: int, coeffs=None,
                 hi=None, lo=None):
        if dmin > dmax:
            raise ValueError("empty window")
        if dmin < MIN_DEGREE:
            raise WindowExhausted(f"window bottom {dmin} below {MIN_DEGREE}")
        self.p, self.prec, self.dmin, self.dmax = p, prec, dmin, dmax
        self.coeffs = {}
        for d, c in (coeffs or {}).items():
            if not dmin <= d <= dmax:
                raise ValueError(f"degree {d} outside [{dmin}, {dmax}]")
            if not c.is_exact_zero():
                self.coeffs[d] = c
        self.hi = hi
        self.lo = (Fraction(lo[0]), Fraction(lo[1])) if lo is not None else None

    # -- construction ---------------------------------------------------
    @classmethod
    def from_dict(cls, p, prec, dmin, dmax, data: dict) -> "LaurentWindow":
        coeffs = {}
        for d, c in data.items():
            if not isinstance(c, PadicScalar):
                c = PadicScalar.from_fraction(p, c, prec)
            coeffs[int(d)] = c
        return cls(p, prec, dmin, dmax, coeffs)

    @classmethod
    def zero(cls, p, prec=DEFAULT_PREC, dmin=-8, dmax=40):
        return cls(p, prec, dmin, dmax)

    @classmethod
    def monomial(cls, p, m, c=1, prec=DEFAULT_PREC, dmin=-8, dmax=40):
        return cls.from_dict(p, prec, min(dmin, m), max(dmax, m), {m: c})

    def like(self, coeffs, dmin=None, dmax=None, hi=None, lo=None):
        return LaurentWindow(self.p, self.prec, self.dmin if dmin is None else dmin,
                             self.dmax if dmax is None else dmax, coeffs, hi, lo)

    def coeff(self, d: int) -> PadicScalar:
        if not self.dmin <= d <= self.dmax:
            raise IndexError(f"degree {d} outside the window")
        return self.coeffs.get(d, PadicScalar.zero(self.p))

    def one_like(self):
        return self.like({0: PadicScalar.from_int(self.p, 1, self.prec)})

    def support(self):
        return sorted(self.coeffs)

    def low_known(self):
        return min(self.coeffs) if self.coeffs else None

    # -- precision summaries --------------------------------------------
    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def certified_digits(self, lo_deg=None, hi_deg=None):
        """Minimum absolute precision over the coefficients in a degree range."""
        lo_deg = self.dmin if lo_deg is None else lo_deg
        hi_deg = self.dmax if hi_deg is None else hi_deg
        best = None
        for d in range(max(lo_deg, self.dmin), min(hi_deg, self.dmax) + 1):
            c = self.coeffs.get(d)
            if c is None:
                continue
            a = c.absprec
            if a is not None and (best is None or a < best):
                best = a
        return best

    @property
    def loss(self) -> int:
        """Digits forfeited relative to the base precision (worst coefficient)."""
        worst = 0
        for c in self.coeffs.values():
            if c.val is not None:
                worst = max(worst, self.prec - c.prec)
        return worst

    def cap_all(self, absprec) -> "LaurentWindow":
        return self.like({d: c.cap(absprec) for d, c in self.coeffs.items()},
                         hi=self.hi, lo=self.lo)

    def restrict(self, dmin, dmax) -> "LaurentWindow":
        """Shrink the window, folding dropped coefficients into the tails."""
        dmin, dmax = max(dmin, self.dmin), min(dmax, self.dmax)
        lo = self.lo
        if lo is not None:
            lo = (lo[0] - lo[1] * (dmin - self.dmin), lo[1])
        x = LaurentWindow(self.p, self.prec, self.dmin, self.dmax, self.coeffs, self.hi, None)
        x.lo = lo
        return _fold(x, dmin, dmax)

    # -- ring structure -------------------------------------------------
    def constant(self, c) -> "LaurentWindow":
        if not isinstance(c, PadicScalar):
            c = PadicScalar.from_fraction(self.p, c, self.prec + _GUARD)
        return LaurentWindow(self.p, self.prec, min(self.dmin, 0), max(self.dmax, 0), {0: c})

    def __add__(self, other):
        if not isinstance(other, LaurentWindow):
            other = self.constant(other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return self.like({d: -c for d, c in self.coeffs.items()}, hi=self.hi, lo=self.lo)

    def __sub__(self, other):
        if not isinstance(other, LaurentWindow):
            other = self.constant(other)
        return add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentWindow":
        if not isinstance(c, PadicScalar):
            c = PadicScalar.from_fraction(self.p, c, self.prec + _GUARD)
        if c.is_exact_zero():
            return self.like({})
        vc = vbound(c)
        hi = (self.hi[0] + vc, self.hi[1]) if self.hi else None
        lo = (self.lo[0] + vc, self.lo[1]) if self.lo else None
        return self.like({d: a * c for d, a in self.coeffs.items()}, hi=hi, lo=lo)

    def __mul__(self, other):
        if isinstance(other, LaurentWindow):
            return series_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def shift(self, k: int) -> "LaurentWindow":
        """Multiply by T^k (the window moves with the series)."""
        hi = None
        if self.hi is not None:
            v0, kap = self.hi
            # log_p(m + |k|) <= log_p(m) + log_p(1 + |k|) + 1
            hi = (v0 - kap * (ilog(1 + abs(k), self.p) + 1), kap) if k < 0 else self.hi
        return LaurentWindow(self.p, self.prec, self.dmin + k, self.dmax + k,
                             {d + k: c for d, c in self.coeffs.items()}, hi, self.lo)

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c})T^{d}" for d, c in sorted(self.coeffs.items()))
        return f"LaurentWindow[{self.dmin},{self.dmax}]({body or '0'}; hi={self.hi}, lo={self.lo})"

    # -- operators as methods -------------------------------------------
    def phi(self):
        return phi(self)

    def psi(self):
        return psi(self)

    def gamma(self, a):
        return gamma(self, a)

    def partial(self):
        return partial(self)

    def nabla(self, i=0, **kw):
        return nabla(self, i, **kw)

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        out = {"p": self.p, "prec": self.prec, "dmin": self.dmin, "dmax": self.dmax,
               "coeffs": {str(d): c.to_json() for d, c in sorted(self.coeffs.items())},
               "loss": self.loss}
        if self.hi is not None:
            out["hi_tail"] = [self.hi[0], self.hi[1]]
        if self.lo is not None:
            out["lo_tail"] = [str(self.lo[0]), str(self.lo[1])]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentWindow":
        required = {"p", "prec", "dmin", "dmax", "coeffs"}
        if not isinstance(obj, dict) or not required <= set(obj):
            raise ValueError(f"laurent window needs keys {sorted(required)}")
        p, prec = obj["p"], obj["prec"]
        if not all(isinstance(obj[k], int) for k in ("p", "prec", "dmin", "dmax")):
            raise ValueError("p, prec, dmin, dmax must be integers")
        if p < 3 or p % 2 == 0 or not obj["dmin"] <= 0 <= obj["dmax"]:
            raise ValueError("need an odd prime and dmin <= 0 <= dmax")
        if not isinstance(obj["coeffs"], dict):
            raise ValueError("coeffs must be an object")
        coeffs = {int(k): PadicScalar.from_json(p, v) for k, v in obj["coeffs"].items()}
        hi = tuple(obj["hi_tail"]) if obj.get("hi_tail") is not None else None
        lo = tuple(Fraction(x) for x in obj["lo_tail"]) if obj.get("lo_tail") is not None else None
        return cls(p, prec, obj["dmin"], obj["dmax"], coeffs, hi, lo)


def add(f: LaurentWindow, g: LaurentWindow) -> LaurentWindow:
    p = f.p
    highs = [x.dmax for x in (f, g) if x.hi is not None]
    dmax = min(highs) if highs else max(f.dmax, g.dmax)
    lows = [x.dmin for x in (f, g) if x.lo is not None]
    dmin = max(lows) if lows else min(f.dmin, g.dmin)
    dmin = min(dmin, 0)
    dmax = max(dmax, 0)
    hi = _hi_min(f.hi, g.hi)
    lo = None
    for x in (f, g):
        if x.lo is not None:
            v0, s = x.lo
            lo = _lo_min(lo, (v0 - s * (dmin - x.dmin), s))
    acc: dict[int, PadicScalar] = {}
    for x in (f, g):
        for d, c in x.coeffs.items():
            acc[d] = acc[d] + c if d in acc else c
    out = LaurentWindow(p, max(f.prec, g.prec), min(dmin, f.dmin, g.dmin),
                        max(dmax, f.dmax, g.dmax), acc, hi, lo)
    if out.dmin == dmin and out.dmax == dmax:
        return out
    return _fold(out, dmin, dmax)


def _fold(x: LaurentWindow, dmin: int, dmax: int) -> LaurentWindow:
    """Drop degrees outside [dmin, dmax] into the tails (tails stay as given,
    already expressed for the new anchor)."""
    p = x.p
    keep, hi, lo = {}, x.hi, x.lo
    for d, c in x.coeffs.items():
        vb = vbound(c)
        if dmin <= d <= dmax:
            keep[d] = c
        elif vb is None:
            continue
        elif d > dmax:
            k = hi[1] if hi else 0
            hi = _hi_min(hi, (vb + k * ilog(d, p), k)) if hi else (vb, 0)
        else:
            s = lo[1] if lo else Fraction(1)
            cand = Fraction(vb) - s * (dmin - 1 - d)
            lo = (min(lo[0], cand), s) if lo else (cand, s)
    return LaurentWindow(p, x.prec, dmin, dmax, keep, hi, lo)


def _vmin(x: LaurentWindow):
    vs = [vbound(c) for c in x.coeffs.values()]
    vs = [v for v in vs if v is not None]
    return min(vs) if vs else None


def series_mul(f: LaurentWindow, g: LaurentWindow) -> LaurentWindow:
    """Product, restricted to the degrees the inputs determine."""
    p = f.p
    prod: dict[int, PadicScalar] = {}
    for i, a in f.coeffs.items():
        for j, b in g.coeffs.items():
            c = a * b
            d = i + j
            prod[d] = prod[d] + c if d in prod else c
    lf, lg = f.low_known(), g.low_known()
    if lf is None or lg is None:
        lf = lg = 0
    # top: a tail above dmax_f meets the lowest known degree of g
    dmax = max(f.dmax, g.dmax)
    if f.hi is not None:
        dmax = min(dmax, f.dmax + min(lg, 0) if g.coeffs else f.dmax)
    if g.hi is not None:
        dmax = min(dmax, g.dmax + min(lf, 0) if f.coeffs else g.dmax)
    dmax = max(dmax, 0)
    if f.lo is None and g.lo is None:
        dmin = min(f.dmin, g.dmin, lf + lg)
    else:
        dmin = min(f.dmin, g.dmin)
    dmin = min(dmin, 0)
    caps: dict[int, Fraction] = {}

    def cap(d, b):
        if d in caps:
            caps[d] = min(caps[d], b)
        else:
            caps[d] = b

    lo_new = None
    for x, y in ((f, g), (g, f)):
        if x.lo is None:
            continue
        v0, s = x.lo
        # dropped terms of x below its window times known terms of y
        for r, b in y.coeffs.items():
            vb = vbound(b)
            if vb is None:
                continue
            for d in range(dmin, dmax + 1):
                m = d - r
                if m < x.dmin:
                    cap(d, v0 + s * (x.dmin - 1 - m) + vb)
            lo_new = _lo_min(lo_new, (v0 + s * (x.dmin - dmin + r) + vb, s))
        if y.lo is not None and x is f:
            w0, t = y.lo
            sm = min(s, t)
            top = x.dmin + y.dmin - 2
            for d in range(dmin, min(dmax, top) + 1):
                cap(d, v0 + w0 + sm * (top - d))
            lo_new = _lo_min(lo_new, (v0 + w0 + sm * (top + 1 - dmin), sm))
        if y.hi is not None:
            h0, kap = y.hi
            # tail of y above its window against the tail of x below its window
            for d in range(dmin, dmax + 1):
                x0 = max(0, x.dmin - d + y.dmax)
                cap(d, v0 + h0 + _scan_min(
                    lambda e: s * e - kap * ilog(max(1, d - x.dmin + 1 + e), p), x0, 80 + 40 * kap))
            k_e = _scan_min(lambda m: s * m - kap * ilog(m, p), y.dmax + 1, 80 + 40 * kap)
            lo_new = _lo_min(lo_new, (v0 + h0 + k_e + s * (x.dmin - dmin), s))
    # new upper tail
    kap = (f.hi[1] if f.hi else 0) + (g.hi[1] if g.hi else 0)
    hi_new = None
    for x, y in ((f, g), (g, f)):
        if x.hi is None:
            continue
        h0, kx = x.hi
        for r, b in y.coeffs.items():
            vb = vbound(b)
            if vb is None:
                continue
            extra = 0 if r >= 0 else ilog(1 + abs(r), p) + 1
            hi_new = _hi_min(hi_new, (h0 + vb - kx * extra, kap))
        if y.hi is not None and x is f:
            hi_new = _hi_min(hi_new, (h0 + y.hi[0], kap))
        if y.lo is not None:
            w0, s = y.lo
            k_e = _scan_min(lambda e: s * e - kx * ilog(2 - y.dmin + e, p), 0, 80 + 40 * kx)
            hi_new = _hi_min(hi_new, (_floor_frac(h0 + w0 - kx + k_e), kap))
    for x, y in ((f, g), (g, f)):
        if x.lo is None:
            continue
        for r, b in y.coeffs.items():
            vb = vbound(b)
            if vb is not None and r + x.dmin - 1 > dmax:
                hi_new = _hi_min(hi_new, (_floor_frac(x.lo[0] + vb), kap))
    keep = {}
    for d, c in prod.items():
        if d in caps:
            c = c.cap(_ceil(caps[d]))
        if dmin <= d <= dmax:
            keep[d] = c
            continue
        vb = vbound(c)
        if vb is None:
            continue
        if d > dmax:
            hi_new = _hi_min(hi_new, (vb + kap * ilog(d, p), kap))
        else:
            s = lo_new[1] if lo_new else Fraction(1)
            lo_new = _lo_min(lo_new, (Fraction(vb) - s * (dmin - 1 - d), s))
    for d, b in caps.items():
        if dmin <= d <= dmax and d not in keep:
            keep[d] = PadicScalar.zero(p, _ceil(b))
    return LaurentWindow(p, max(f.prec, g.prec), dmin, dmax, keep, hi_new, lo_new)


def _floor_frac(x) -> int:
    return math.floor(x)


def series_invert(f: LaurentWindow) -> LaurentWindow:
    """Inverse of a series whose negative side is exact (no lower tail)."""
    p = f.p
    if f.lo is not None:
        raise NotInvertible("inverse of a series with an unknown lower tail")
    live = [d for d in sorted(f.coeffs) if not f.coeffs[d].is_zero()]
    if not live:
        raise NotInvertible("series is zero at precision")
    m0 = live[0]
    if any(f.coeffs[d].absprec is not None and d < m0 for d in f.coeffs):
        # an inexact zero below the leading term hides the true leading degree
        raise NotInvertible("leading coefficient is not determined")
    c0 = f.coeffs[m0]
    top = f.dmax - m0 if f.hi is not None else f.dmax + max(0, -m0)
    top = max(top, 0)
    inv_c0 = 1 / c0
    g = [inv_c0]
    for k in range(1, top + 1):
        acc = PadicScalar.zero(p)
        for r in range(1, k + 1):
            a = f.coeffs.get(m0 + r)
            if a is not None and not a.is_exact_zero():
                acc = acc + a * g[k - r]
        g.append(-acc * inv_c0)
    out = {k - m0: c for k, c in enumerate(g)}
    dmin = min(-m0, 0, f.dmin)
    dmax = top - m0
    integral = c0.val == 0 and all((vbound(c) or 0) >= 0 for c in f.coeffs.values()) \
        and (f.hi is None or (f.hi[0] >= 0 and f.hi[1] == 0))
    hi = (0, 0) if integral else (UNKNOWN_TAIL, 0)
    out = {d: c for d, c in out.items() if dmin <= d <= dmax}
    return LaurentWindow(p, f.prec, dmin, max(dmax, 0), out, hi, None)


@lru_cache(maxsize=None)
def t_series(p: int, prec: int = DEFAULT_PREC, dmax: int = 40, dmin: int = -8) -> LaurentWindow:
    """t = log(1+T) = sum (-1)^(k-1) T^k / k, exact through dmax."""
    coeffs = {k: PadicScalar.from_fraction(p, Fraction((-1) ** (k - 1), k), prec + _GUARD)
              for k in range(1, dmax + 1)}
    # v_p(1/k) >= -floor(log_p k)
    return LaurentWindow(p, prec, dmin, dmax, coeffs, hi=(0, 1))


def t_power(p: int, k: int, prec: int = DEFAULT_PREC, dmax: int = 40, dmin: int = -8) -> LaurentWindow:
    out = LaurentWindow.from_dict(p, prec, dmin, dmax, {0: 1})
    t = t_series(p, prec, dmax, dmin)
    for _ in range(k):
        out = series_mul(out, t)
    return out


def t_over_T_inverse(p: int, prec: int = DEFAULT_PREC, dmax: int = 40) -> LaurentWindow:
    """T/t as the inverse of t/T = sum (-1)^k T^k/(k+1)."""
    coeffs = {k: PadicScalar.from_fraction(p, Fraction((-1) ** k, k + 1), prec + _GUARD)
              for k in range(0, dmax)}
    tT = LaurentWindow(p, prec, 0, dmax - 1, coeffs, hi=(0, 1))
    return series_invert(tT)


# -- Frobenius -----------------------------------------------------------

@lru_cache(maxsize=None)
def _phi_pos(p: int, m: int, top: int) -> tuple:
    """Integer coefficients of ((1+T)^p - 1)^m through degree top, and
    whether anything was cut off."""
    base = [math.comb(p, k) for k in range(p + 1)]
    base[0] = 0
    poly = [1]
    for _ in range(m):
        nxt = [0] * min(len(poly) + p, top + 1)
        for i, a in enumerate(poly):
            if a:
                for k in range(1, p + 1):
                    if i + k <= top:
                        nxt[i + k] += a * base[k]
        poly = nxt
    return tuple(poly), m * p > top


_UINV: dict = {}


def _u_inv_pow(p: int, n: int, count: int) -> list:
    """Integer coefficients b_e (e < count) of u^(-n) in powers of T^(-1),
    u = ((1+T)^p - 1)/T^p = 1 + sum_{e=1}^{p-1} C(p, e) T^(-e)."""
    key = (p, n)
    have = _UINV.get(key)
    if have is not None and len(have) >= count:
        return have
    count = max(count, 2 * len(have) if have else 64)
    if n == 0:
        out = [1] + [0] * (count - 1)
    else:
        inv = _u_inv_pow(p, 1, count) if n > 1 else None
        if n == 1:
            u = [math.comb(p, p - e) for e in range(p)]
            out = [0] * count
            out[0] = 1
            for e in range(1, count):
                out[e] = -sum(u[k] * out[e - k] for k in range(1, min(e, p - 1) + 1))
        else:
            prev = _u_inv_pow(p, n - 1, count)
            out = [0] * count
            for i in range(count):
                a = prev[i]
                if a:
                    for j in range(count - i):
                        out[i + j] += a * inv[j]
    _UINV[key] = out
    return out


def phi(f: LaurentWindow) -> LaurentWindow:
    """T -> (1+T)^p - 1.  The negative side of the window grows by a factor
    p so every coefficient of phi of a Laurent polynomial stays exact."""
    p = f.p
    low = f.low_known()
    if f.lo is not None or (low is not None and low < 0):
        dmin_out = p * f.dmin
    else:
        dmin_out = f.dmin
    if dmin_out < MIN_DEGREE:
        raise WindowExhausted(f"phi would need degree {dmin_out}")
    dmax = f.dmax
    acc: dict[int, PadicScalar] = {}
    hi = f.hi
    lo = None
    s_phi = Fraction(1, p - 1)
    for m, a in f.coeffs.items():
        if m >= 0:
            poly, cut = _phi_pos(p, m, dmax)
            for d, k in enumerate(poly):
                if k:
                    acc[d] = acc[d] + a * k if d in acc else a * k
            if cut and vbound(a) is not None:
                hi = _hi_min(hi, (vbound(a), hi[1] if hi else 0))
        else:
            n = -m
            count = -dmin_out - p * n + 1  # degrees -pn down to dmin_out
            b = _u_inv_pow(p, n, count)
            for e, k in enumerate(b[:count]):
                if k:
                    d = -p * n - e
                    acc[d] = acc[d] + a * k if d in acc else a * k
            vb = vbound(a)
            if vb is not None:
                # dropped T^(-pn-e) has valuation >= v(a) + e/(p-1)
                lo = _lo_min(lo, (vb + Fraction(1 - dmin_out - p * n, p - 1), s_phi))
    if f.lo is not None:
        v, s = f.lo
        if s <= Fraction(p, p - 1):
            lo = _lo_min(lo, (v - s * Fraction(p - 1, p), s / p))
        else:
            lo = _lo_min(lo, (v - 1, s_phi))
    return LaurentWindow(p, f.prec, dmin_out, dmax, acc, hi, lo)


# -- psi -----------------------------------------------------------------

def _k1_mul(p: int, a: list, b: list) -> list:
    """Product of integer vectors in Z[zeta_p] (power basis, length p-1)."""
    fld = field(p, 1)
    out = [0] * (p - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    for k, c in enumerate(fld.powers[(i + j) % p]):
                        if c:
                            out[k] += x * y * c
    return out


def _k1_trace(p: int, a: list) -> int:
    """Tr_{K_1/Q_p} of an integer vector: Tr(zeta^k) = p-1 if p | k else -1."""
    return a[0] * (p - 1) - sum(a[1:])


@lru_cache(maxsize=None)
def _psi_neg_weights(p: int, n: int, count: int) -> tuple:
    """W_e / p for e < count, where the trace of f(zeta(1+T)-1) over mu_p sends
    T^(-n) to sum_e W_e T^(-n-e).  W_e = [e=0] + C(n-1+e, e) Tr(zeta^-n w^e)
    with w = zeta^-1 - 1; every W_e is divisible by p."""
    fld = field(p, 1)
    zinv_n = list(fld.powers[(-n) % p])
    w = [a - b for a, b in zip(fld.powers[p - 1], [1] + [0] * (p - 2))]
    cur = zinv_n
    out = []
    for e in range(count):
        tr = _k1_trace(p, cur)
        W = (1 if e == 0 else 0) + math.comb(n - 1 + e, e) * tr
        if W % p:
            raise AssertionError("trace weight not divisible by p")
        out.append(W // p)
        cur = _k1_mul(p, cur, w)
    return tuple(out)


@lru_cache(maxsize=None)
def _psi_pos_weight(p: int, r: int) -> Fraction:
    """(1/p) sum over mu_p of zeta^r, computed as (1 + Tr_{K_1/Q_p} zeta^r)/p."""
    fld = field(p, 1)
    return Fraction(1 + _k1_trace(p, list(fld.powers[r % p])), p)


def psi(f: LaurentWindow) -> LaurentWindow:
    """The left inverse of phi: trace over mu_p, then undo phi."""
    p = f.p
    out: dict[int, PadicScalar] = {}
    # positive part, in the basis S^i with S = 1+T, where phi is S -> S^p
    pos = {m: a for m, a in f.coeffs.items() if m >= 0}
    if pos:
        top = max(pos)
        b = {}
        for i in range(top + 1):
            acc = None
            for m in range(i, top + 1):
                a = pos.get(m)
                if a is None:
                    continue
                k = math.comb(m, i) * (-1) ** (m - i)
                term = a * k
                acc = term if acc is None else acc + term
            if acc is not None:
                w = _psi_pos_weight(p, i)
                if w:
                    b[i // p] = acc * PadicScalar.from_fraction(p, w, f.prec + _GUARD)
        for j, g in b.items():
            for r in range(j + 1):
                term = g * math.comb(j, r)
                out[r] = out[r] + term if r in out else term
    dmax_out = f.dmax // p if f.hi is not None else f.dmax
    hi = None
    if f.hi is not None:
        v0, kap = f.hi
        for j in range(0, dmax_out + 1):
            cap = _scan_min(lambda m: v0 - kap * ilog(m, p) + max(0, m // p - j),
                            f.dmax + 1, p * (60 + 20 * kap))
            out[j] = out.get(j, PadicScalar.zero(p)).cap(cap)
        hi = (v0 - 3 * kap, kap)
    # negative part: trace in an extended window, then a unit-diagonal solve
    neg = {m: a for m, a in f.coeffs.items() if m < 0}
    if neg:
        ext = p * f.dmin
        h: dict[int, PadicScalar] = {}
        for m, a in neg.items():
            n = -m
            weights = _psi_neg_weights(p, n, -ext - n + 1)
            for e, wt in enumerate(weights):
                if wt:
                    d = -n - e
                    term = a * wt
                    h[d] = h[d] + term if d in h else term
        g: dict[int, PadicScalar] = {}
        for d in range(-1, f.dmin - 1, -1):
            acc = h.get(p * d, PadicScalar.zero(p))
            for d2, c in g.items():
                k = _u_inv_pow(p, -d2, p * (d2 - d) + 1)[p * (d2 - d)]
                if k:
                    acc = acc - c * k
            if not acc.is_exact_zero():
                g[d] = acc
        for D in range(ext, 0):
            acc = -h.get(D, PadicScalar.zero(p))
            for d2, c in g.items():
                e = p * d2 - D
                if e >= 0:
                    k = _u_inv_pow(p, -d2, e + 1)[e]
                    if k:
                        acc = acc + c * k
            if not acc.is_zero():
                raise NotInPhiImage(f"trace residual at degree {D}: {acc}")
        out.update(g)
    if f.lo is not None:
        v0, s = f.lo
        for d in range(f.dmin, min(0, (f.dmin - 1) // p + 1)):
            bound = v0 + s * (f.dmin - 1 - min(d, f.dmin - 1))
            out[d] = out.get(d, PadicScalar.zero(p)).cap(_ceil(bound))
    return LaurentWindow(p, f.prec, f.dmin, max(dmax_out, 0),
                         {d: c for d, c in out.items() if f.dmin <= d <= max(dmax_out, 0)},
                         hi, f.lo)


# -- gamma_a -------------------------------------------------------------
def _as_unit(p: int, a, prec: int):
    """(integer lift, absolute precision) of a p-adic unit."""
    if isinstance(a, PadicScalar):
        if a.val != 0:
            raise DomainError("gamma_a needs a in Z_p^x")
        P = a.absprec
        return a.lift_int(P) % ppow(p, P), P
    if a % p == 0:
        raise DomainError("gamma_a needs a in Z_p^x")
    P = prec + 64
    return a % ppow(p, P), P




@lru_cache(maxsize=64)
def _gamma_tables(p: int, a: int, P: int, dmax: int, nmax: int):
    """Integer coefficient lists mod p^P of A^m (m <= dmax, degrees <= dmax)
    and B^n (n <= nmax, degrees <= dmax + n), A = (1+T)^a - 1, B = T/A."""
    mod = ppow(p, P)
    top = dmax + nmax + 1
    binoms = [1]
    for k in range(1, top + 2):
        binoms.append(binoms[-1] * (a - k + 1) // k)
    # binoms[k] = C(a, k) exactly (a is a nonnegative integer lift)
    A = [0] + [b % mod for b in binoms[1:dmax + 1]]
    apows = [[1] + [0] * dmax]
    for _ in range(dmax):
        prev = apows[-1]
        nxt = [0] * (dmax + 1)
        for i, x in enumerate(prev):
            if x:
                for j in range(1, dmax + 1 - i):
                    if A[j]:
                        nxt[i + j] = (nxt[i + j] + x * A[j]) % mod
        apows.append(nxt)
    q = [b % mod for b in binoms[1:top + 1]]  # A/T
    inv0 = pow(q[0], -1, mod)
    B = [inv0]
    for e in range(1, top):
        s = sum(q[k] * B[e - k] for k in range(1, e + 1))
        B.append(-s * inv0 % mod)
    bpows = [[1] + [0] * (top - 1)]
    for _ in range(nmax):
        prev = bpows[-1]
        nxt = [0] * top
        for i, x in enumerate(prev):
            if x:
                for j in range(top - i):
                    nxt[i + j] = (nxt[i + j] + x * B[j]) % mod
        bpows.append(nxt)
    return apows, bpows


def gamma(f: LaurentWindow, a) -> LaurentWindow:
    """T -> (1+T)^a - 1 for a in Z_p^x."""
    p = f.p
    aint, P = _as_unit(p, a, f.prec)
    dmax, dmin = f.dmax, f.dmin
    nmax = max(0, -dmin)
    apows, bpows = _gamma_tables(p, aint, P, dmax, nmax)
    acc: dict[int, PadicScalar] = {}
    caps: dict[int, int] = {}
    vtop = None
    for m, c in f.coeffs.items():
        vb = vbound(c)
        if vb is None:
            continue
        if m >= 0:
            row, start = apows[m], 0
        else:
            row, start = bpows[-m], m
        for e, k in enumerate(row):
            d = start + e
            if d > dmax:
                break
            if k:
                acc[d] = acc[d] + c * k if d in acc else c * k
            # C(a+delta, i) - C(a, i) has valuation >= v(delta) - floor(log_p i)
            cp = vb + P - ilog(e + 1, p)
            caps[d] = min(caps.get(d, cp), cp)
        # dropped degrees above dmax carry integral multiples of c
        vtop = vb if vtop is None else min(vtop, vb)
    hi = f.hi
    if vtop is not None:
        hi = _hi_min(hi, (vtop, hi[1] if hi else 0))
    lo = f.lo
    cap_lo = None
    if lo is not None:
        # every dropped T^m (m < dmin) reaches all degrees >= m
        cap_lo = _ceil(lo[0])
        hi = _hi_min(hi, (_floor_frac(lo[0]), hi[1] if hi else 0))
    out = {}
    for d in range(dmin, dmax + 1):
        c = acc.get(d)
        cp = caps.get(d)
        if cap_lo is not None:
            cp = cap_lo if cp is None else min(cp, cap_lo)
        if c is None:
            if cp is not None and cap_lo is not None:
                out[d] = PadicScalar.zero(p, cp)
            continue
        out[d] = c.cap(cp) if cp is not None else c
    return LaurentWindow(p, f.prec, dmin, dmax, out, hi, lo)


# -- derivations ---------------------------------------------------------
def partial(f: LaurentWindow) -> LaurentWindow:
    """(1+T) d/dT, so that partial(t) = 1."""
    p = f.p
    acc: dict[int, PadicScalar] = {}
    for m, c in f.coeffs.items():
        if m == 0:
            continue
        for d in (m - 1, m):
            acc[d] = acc[d] + c * m if d in acc else c * m
    dmin = f.dmin - 1
    dmax = f.dmax
    hi = f.hi
    if f.hi is not None:
        v0, kap = f.hi
        dmax = f.dmax - 1
        hi = (v0 - kap, kap)
        top = acc.pop(f.dmax, None)
        if top is not None and vbound(top) is not None:
            hi = _hi_min(hi, (vbound(top) + kap * ilog(max(f.dmax, 1), p), kap))
        dmax = max(dmax, 0)
    lo = f.lo
    if lo is not None:
        # degree dmin - 1 meets the unknown coefficient just below the window
        c = acc.get(dmin, PadicScalar.zero(p))
        acc[dmin] = c.cap(_ceil(lo[0])) if not c.is_exact_zero() else PadicScalar.zero(p, _ceil(lo[0]))
    acc = {d: c for d, c in acc.items() if dmin <= d <= dmax}
    return LaurentWindow(p, f.prec, dmin, dmax, acc, hi, lo)


def _chi_log(p: int, a, prec: int) -> PadicScalar:
    x = a if isinstance(a, PadicScalar) else PadicScalar.from_int(p, a, prec + 64)
    return plog(x)


def series_weight(f: LaurentWindow):
    """min over all degrees of v(f_d) + d/(p-1), tails included."""
    p = f.p
    r = Fraction(1, p - 1)
    best = None
    for d, c in f.coeffs.items():
        vb = vbound(c)
        if vb is not None:
            w = vb + d * r
            best = w if best is None else min(best, w)
    if f.hi is not None:
        v0, kap = f.hi
        w = _scan_min(lambda m: v0 - kap * ilog(m, p) + m * r, f.dmax + 1, 200)
        best = w if best is None else min(best, w)
    if f.lo is not None:
        v0, s = f.lo
        if s < r:
            raise DomainError("lower tail decays too slowly for the series form of nabla")
        w = v0 + (f.dmin - 1) * r
        best = w if best is None else min(best, w)
    return best


def nabla(f: LaurentWindow, i=0, mode: str = "closed", gammagen=None,
          terms: int | None = None) -> LaurentWindow:
    """nabla - i.  Closed form t * partial; the series form sums
    log(gamma)/log chi(gamma) with gamma = gamma_{1+p} unless given."""
    p = f.p
    if mode == "closed":
        df = partial(f)
        low = df.low_known()
        top = df.dmax - min(low or 0, 0)
        t = t_series(p, f.prec, max(top, 1), min(df.dmin, -1))
        out = series_mul(t, df)
    elif mode == "series":
        a = 1 + p if gammagen is None else gammagen
        lc = _chi_log(p, a, f.prec)
        if lc.val is None or lc.val < 1:
            raise DomainError("gamma generator must be 1 mod p")
        w0 = series_weight(f)
        vl = lc.val
        r = Fraction(1, p - 1)
        if terms is None:
            terms = 1
            while w0 + terms + 1 - ilog(terms + 1, p) - vl - f.dmax * r < f.prec + 1:
                terms += 1
        x = f
        out = None
        for k in range(1, terms + 1):
            x = gamma(x, a) - x
            term = x.scale(PadicScalar.from_fraction(p, Fraction((-1) ** (k - 1), k), f.prec + _GUARD) / lc)
            out = term if out is None else out + term
        # remainder: k-th term at degree d has valuation >= w0 + k - v(k) - v(lc) - d/(p-1)
        k = terms + 1
        rest = w0 + k - ilog(k, p) - vl
        capped = {}
        for d in range(out.dmin, out.dmax + 1):
            c = out.coeffs.get(d, PadicScalar.zero(p))
            cp = _ceil(rest - d * r)
            capped[d] = c.cap(cp)
        out = out.like(capped, hi=out.hi, lo=out.lo)
    else:
        raise ValueError(f"unknown nabla mode {mode!r}")
    if i:
        out = out - f.scale(i)
    return out


# -- residues ------------------------------------------------------------
def res(f: LaurentWindow) -> PadicScalar:
    """Coefficient of T^(-1)."""
    if f.dmin > -1:
        if f.lo is None:
            return PadicScalar.zero(f.p)
        return PadicScalar.zero(f.p, _ceil(_lo_at(f.lo, f.dmin, -1)))
    return f.coeffs.get(-1, PadicScalar.zero(f.p))


def reslog(f: LaurentWindow) -> PadicScalar:
    """Residue of f dt = f dT/(1+T): sum_{n>=1} (-1)^(n-1) f_{-n}."""
    acc = PadicScalar.zero(f.p)
    for d, c in f.coeffs.items():
        if d < 0:
            acc = acc + (c if d % 2 else -c)
    if f.lo is not None:
        acc = acc.cap(_ceil(_lo_at(f.lo, f.dmin, min(f.dmin - 1, -1))))
    return acc
