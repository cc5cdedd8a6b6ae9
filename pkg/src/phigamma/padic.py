"""Capped relative-precision arithmetic in Q_p.

A nonzero scalar is p^val * unit with the unit known mod p^prec.  A zero
carries the absolute precision it is known to (``O(p^abs)``); an exact zero
has ``abs = None``.  Exact zeros matter: sparse series multiply their
absent coefficients against large constants and must not lose digits.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class PadicError(ArithmeticError):
    """Base class for kernel arithmetic failures."""


class DivisionByZero(PadicError, ZeroDivisionError):
    pass


class PrecisionExhausted(PadicError):
    pass


class DomainError(PadicError):
    pass


DEFAULT_PREC = 12
# extra digits given to literal ints/Fractions so they never limit precision
_LITERAL_GUARD = 64


@lru_cache(maxsize=None)
def ppow(p: int, k: int) -> int:
    return p**k


def vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int) -> int | None:
    if x == 0:
        return None
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def ilog(m: int, p: int) -> int:
    """floor(log_p(m)) for m >= 1."""
    k = 0
    q = p
    while q <= m:
        q *= p
        k += 1
    return k


def _min_abs(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PadicScalar:
    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val, unit: int, prec):
        # use the constructors below; this one trusts its arguments
        self.p = p
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, p: int, absprec=None) -> "PadicScalar":
        return cls(p, None, 0, absprec)

    @classmethod
    def from_parts(cls, p: int, n: int, e: int, absprec: int) -> "PadicScalar":
        """The value n * p^e known mod p^absprec."""
        if n == 0 or absprec <= e:
            return cls(p, None, 0, absprec)
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        val = e + v
        if val >= absprec:
            return cls(p, None, 0, absprec)
        prec = absprec - val
        return cls(p, val, n % ppow(p, prec), prec)

    @classmethod
    def from_int(cls, p: int, n: int, prec: int = DEFAULT_PREC) -> "PadicScalar":
        if n == 0:
            return cls.zero(p)
        v = vp_int(n, p)
        return cls(p, v, (n // ppow(p, v)) % ppow(p, prec), prec)

    @classmethod
    def from_fraction(cls, p: int, x, prec: int = DEFAULT_PREC) -> "PadicScalar":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        num, den = x.numerator, x.denominator
        vn, vd = vp_int(num, p), vp_int(den, p)
        num //= ppow(p, vn)
        den //= ppow(p, vd)
        mod = ppow(p, prec)
        return cls(p, vn - vd, num * pow(den, -1, mod) % mod, prec)

    def coerce(self, x) -> "PadicScalar":
        if isinstance(x, PadicScalar):
            if x.p != self.p:
                raise ValueError("prime mismatch")
            return x
        if isinstance(x, int):
            base = self.prec if (self.val is not None and self.prec) else 0
            return PadicScalar.from_int(self.p, x, base + _LITERAL_GUARD)
        if isinstance(x, Fraction):
            base = self.prec if (self.val is not None and self.prec) else 0
            return PadicScalar.from_fraction(self.p, x, base + _LITERAL_GUARD)
        return NotImplemented

    # -- queries --------------------------------------------------------
    def is_zero(self) -> bool:
        return self.val is None

    def is_exact_zero(self) -> bool:
        return self.val is None and self.prec is None

    @property
    def absprec(self):
        """Absolute precision; None means infinite."""
        if self.val is None:
            return self.prec
        return self.val + self.prec

    @property
    def valuation(self):
        return self.val

    def valuation_bound(self):
        """Lower bound for the valuation (absprec for zeros, None if exact)."""
        return self.val if self.val is not None else self.prec

    def digits(self) -> list[int]:
        out, u = [], self.unit
        for _ in range(self.prec if self.val is not None else 0):
            out.append(u % self.p)
            u //= self.p
        return out

    def to_fraction(self) -> Fraction:
        """A rational representative (the canonical lift of the digits)."""
        if self.val is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def lift_int(self, absprec: int) -> int:
        """Integer congruent to self mod p^absprec; requires self integral there."""
        if self.val is None:
            return 0
        if self.val < 0:
            raise DomainError("not integral")
        return self.unit * ppow(self.p, self.val) % ppow(self.p, absprec)

    def cap(self, absprec) -> "PadicScalar":
        """Forget digits at or beyond p^absprec."""
        if absprec is None:
            return self
        cur = self.absprec
        if cur is not None and cur <= absprec:
            return self
        if self.val is None or self.val >= absprec:
            return PadicScalar.zero(self.p, absprec)
        prec = absprec - self.val
        return PadicScalar(self.p, self.val, self.unit % ppow(self.p, prec), prec)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        b = self.coerce(other)
        if b is NotImplemented:
            return b
        a, p = self, self.p
        absp = _min_abs(a.absprec, b.absprec)
        if a.val is None and b.val is None:
            return PadicScalar.zero(p, absp)
        if a.val is None:
            return b.cap(absp)
        if b.val is None:
            return a.cap(absp)
        e = min(a.val, b.val)
        n = a.unit * ppow(p, a.val - e) + b.unit * ppow(p, b.val - e)
        return PadicScalar.from_parts(p, n, e, absp)

    __radd__ = __add__

    def __neg__(self):
        if self.val is None:
            return self
        return PadicScalar(self.p, self.val, (-self.unit) % ppow(self.p, self.prec), self.prec)

    def __sub__(self, other):
        b = self.coerce(other)
        if b is NotImplemented:
            return b
        return self + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self.coerce(other)
        if b is NotImplemented:
            return b
        a, p = self, self.p
        if a.is_exact_zero() or b.is_exact_zero():
            return PadicScalar.zero(p)
        if a.val is None or b.val is None:
            return PadicScalar.zero(p, a.valuation_bound() + b.valuation_bound())
        prec = min(a.prec, b.prec)
        return PadicScalar(p, a.val + b.val, a.unit * b.unit % ppow(p, prec), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self.coerce(other)
        if b is NotImplemented:
            return b
        if b.val is None:
            raise DivisionByZero("divisor is zero at precision")
        a, p = self, self.p
        if a.val is None:
            return a if a.prec is None else PadicScalar.zero(p, a.prec - b.val)
        prec = min(a.prec, b.prec)
        mod = ppow(p, prec)
        return PadicScalar(p, a.val - b.val, a.unit * pow(b.unit, -1, mod) % mod, prec)

    def __rtruediv__(self, other):
        return self.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            if self.val is None:
                raise DivisionByZero("zero to a negative power")
            return (1 / self) ** (-k)
        if k == 0:
            return PadicScalar.from_int(self.p, 1, self.prec if self.val is not None else DEFAULT_PREC)
        if self.val is None:
            return self if self.prec is None else PadicScalar.zero(self.p, k * self.prec)
        return PadicScalar(self.p, self.val * k, pow(self.unit, k, ppow(self.p, self.prec)), self.prec)

    def shift(self, k: int) -> "PadicScalar":
        """Multiply by p^k."""
        if self.val is None:
            return self if self.prec is None else PadicScalar.zero(self.p, self.prec + k)
        return PadicScalar(self.p, self.val + k, self.unit, self.prec)

    def __eq__(self, other):
        b = self.coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return (self - b).is_zero()

    __hash__ = None

    def __bool__(self):
        return self.val is not None

    def __repr__(self):
        if self.val is None:
            return f"O({self.p}^{self.prec})" if self.prec is not None else "0"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.absprec})"

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        if self.val is None:
            return {"val": None, "digits": [], "prec": self.prec}
        return {"val": self.val, "digits": self.digits(), "prec": self.prec}

    @classmethod
    def from_json(cls, p: int, obj: dict) -> "PadicScalar":
        if not isinstance(obj, dict) or set(obj) - {"val", "digits", "prec"}:
            raise ValueError("bad scalar encoding")
        val, digits, prec = obj.get("val"), obj.get("digits"), obj.get("prec")
        if val is None:
            if prec is not None and not isinstance(prec, int):
                raise ValueError("bad zero precision")
            return cls.zero(p, prec)
        if not isinstance(val, int) or not isinstance(prec, int) or prec < 1:
            raise ValueError("bad scalar fields")
        if not isinstance(digits, list) or len(digits) != prec:
            raise ValueError("digit count must equal prec")
        if any(not isinstance(d, int) or not 0 <= d < p for d in digits) or digits[0] == 0:
            raise ValueError("digits out of range or leading digit zero")
        unit = sum(d * p**i for i, d in enumerate(digits))
        return cls(p, val, unit, prec)


def binom(a: PadicScalar, k: int) -> PadicScalar:
    """a(a-1)...(a-k+1)/k! for a in Z_p."""
    p = a.p
    if k < 0:
        raise DomainError("negative k")
    if a.val is not None and a.val < 0:
        raise DomainError("binom needs a in Z_p")
    num = a.coerce(1)
    fact = 1
    for i in range(k):
        num = num * (a - i)
        fact *= i + 1
    out = num / PadicScalar.from_int(p, fact, _LITERAL_GUARD + 64)
    if out.val is None and out.prec is not None and out.prec <= 0:
        raise PrecisionExhausted("division by k! consumed all digits")
    if out.val is not None and out.val < 0:
        raise PrecisionExhausted("division by k! consumed all digits")
    return out


def log_terms(a: PadicScalar) -> int:
    """Minimal R with (R+1)v - floor(log_p(R+1)) >= N, v = v(a-1)."""
    x = a - 1
    if x.val is None:
        return 0
    v, n = x.val, a.prec
    r = 1
    while (r + 1) * v - ilog(r + 1, a.p) < n:
        r += 1
    return r


def plog(a: PadicScalar, terms: int | None = None) -> PadicScalar:
    """Truncated p-adic logarithm of a principal unit."""
    if a.val != 0:
        raise DomainError("plog needs a unit")
    x = a - 1
    if x.val is not None and x.val < 1:
        raise DomainError("plog needs a principal unit")
    if x.val is None:
        return PadicScalar.zero(a.p, x.prec)
    r = log_terms(a) if terms is None else terms
    v = x.val
    total = PadicScalar.zero(a.p)
    xk = x
    for k in range(1, r + 1):
        term = xk / PadicScalar.from_int(a.p, k, a.prec + _LITERAL_GUARD)
        total = total + (term if k % 2 else -term)
        xk = xk * x
    return total.cap((r + 1) * v - ilog(r + 1, a.p))


def log0(a: PadicScalar) -> PadicScalar:
    lg = plog(a)
    if lg.val is None:
        raise DomainError("log0 of a torsion unit")
    return lg.shift(-lg.val)


def teichmuller(p: int, j: int, prec: int = DEFAULT_PREC) -> PadicScalar:
    """The (p-1)-th root of unity congruent to j mod p, by Hensel iteration."""
    if j % p == 0:
        raise DomainError("teichmuller of a non-unit")
    mod = ppow(p, prec)
    x = j % mod
    for _ in range(prec):
        x = pow(x, p, mod)
    return PadicScalar.from_int(p, x, prec)


def torsion_generator(p: int) -> int:
    """Smallest primitive root mod p."""
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    return 1


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
