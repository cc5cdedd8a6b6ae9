"""Localization K_n[[t]] of the Robba window: iota_n and friends.

An element is t^(-tshift) * sum_{i<=L} c_i t^i with c_i in K_n.  The natural
size of the t^j coefficient of iota_n(f) is p^(-nj)/j!, so certified digits
are measured after rescaling by that amount.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .cyclotomic import CycloElement, degree, field
from .padic import DEFAULT_PREC, PadicError, PadicScalar, ilog, vp_int
from .robba import LaurentWindow, vbound

WORK_GUARD = 20


class AccuracyFloorTooLow(PadicError):
    pass


class PoleAtZero(PadicError):
    pass


def _vfact(k: int, p: int) -> int:
    out, q = 0, p
    while q <= k:
        out += k // q
        q *= p
    return out


def natural_scale(p: int, n: int, j: int) -> int:
    """Digits by which the t^j coefficient of iota_n is naturally enlarged."""
    return n * j + _vfact(j, p)


class DifElement:
    __slots__ = ("level", "tshift", "tcoeffs")

    def __init__(self, level: int, tshift: int, tcoeffs: list[CycloElement]):
        if tshift < 0:
            raise ValueError("tshift must be >= 0")
        if not tcoeffs:
            raise ValueError("need at least one t-coefficient")
        fld = tcoeffs[0].field
        if any(c.field != fld for c in tcoeffs) or fld.n != level:
            raise ValueError("all coefficients must live in K_level")
        self.level, self.tshift, self.tcoeffs = level, tshift, list(tcoeffs)

    @property
    def p(self):
        return self.tcoeffs[0].p

    @property
    def tprec(self) -> int:
        return len(self.tcoeffs) - 1

    @property
    def field(self):
        return self.tcoeffs[0].field

    @classmethod
    def constant(cls, c: CycloElement, L: int) -> "DifElement":
        z = c.field.zero()
        return cls(c.field.n, 0, [c] + [z] * L)

    @classmethod
    def t_power(cls, p: int, n: int, k: int, L: int, prec: int = DEFAULT_PREC) -> "DifElement":
        """t^k for any integer k (negative k gives a t-shift)."""
        fld = field(p, n)
        one, z = fld.one(prec + 64), fld.zero()
        if k >= 0:
            return cls(n, 0, [z] * k + [one] + [z] * (L - k)) if k <= L else cls(n, 0, [z] * (L + 1))
        return cls(n, -k, [one] + [z] * L)

    def coeff(self, e: int) -> CycloElement:
        """Coefficient of t^e."""
        i = e + self.tshift
        if 0 <= i <= self.tprec:
            return self.tcoeffs[i]
        if i < 0:
            return self.field.zero()
        raise IndexError(f"t^{e} is beyond the known precision")

    @property
    def top(self) -> int:
        """Highest exponent of t that is known."""
        return self.tprec - self.tshift

    # -- ring structure -------------------------------------------------
    def _aligned(self, other: "DifElement"):
        if other.field != self.field:
            raise ValueError("level mismatch")
        j = max(self.tshift, other.tshift)
        top = min(self.top, other.top)
        a = [self.coeff(e) for e in range(-j, top + 1)]
        b = [other.coeff(e) for e in range(-j, top + 1)]
        return j, a, b

    def __add__(self, other):
        j, a, b = self._aligned(other)
        return DifElement(self.level, j, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return DifElement(self.level, self.tshift, [-c for c in self.tcoeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DifElement":
        return DifElement(self.level, self.tshift, [x * c for x in self.tcoeffs])

    def __mul__(self, other):
        if not isinstance(other, DifElement):
            return self.scale(other)
        if other.field != self.field:
            raise ValueError("level mismatch")
        L = min(self.tprec, other.tprec)
        z = self.field.zero()
        out = [z] * (L + 1)
        for i in range(L + 1):
            a = self.tcoeffs[i]
            if a.is_zero() and a.absprec() is None:
                continue
            for k in range(L + 1 - i):
                out[i + k] = out[i + k] + a * other.tcoeffs[k]
        return DifElement(self.level, self.tshift + other.tshift, out)

    def __rmul__(self, other):
        return self.scale(other)

    def tshift_by(self, k: int) -> "DifElement":
        """Multiply by t^k without losing known coefficients."""
        if k <= self.tshift:
            return DifElement(self.level, self.tshift - k, self.tcoeffs)
        z = self.field.zero()
        extra = k - self.tshift
        return DifElement(self.level, 0, [z] * extra + self.tcoeffs)

    def canonical(self) -> "DifElement":
        """Drop leading zero coefficients while a t-shift remains."""
        j, cs = self.tshift, list(self.tcoeffs)
        while j > 0 and len(cs) > 1 and cs[0].is_zero():
            cs.pop(0)
            j -= 1
        return DifElement(self.level, j, cs)

    # -- tower maps -----------------------------------------------------
    def embed_up(self) -> "DifElement":
        return DifElement(self.level + 1, self.tshift, [c.embed_up() for c in self.tcoeffs])

    def trace_down(self) -> "DifElement":
        return DifElement(self.level - 1, self.tshift, [c.trace_down() for c in self.tcoeffs])

    def normalized_trace(self) -> "DifElement":
        return DifElement(self.level - 1, self.tshift, [c.normalized_trace() for c in self.tcoeffs])

    # -- precision --------------------------------------------------------
    def certified_digits(self):
        """min over t-degrees of the absolute precision after natural rescaling."""
        p, n = self.p, self.level
        best = None
        for i, c in enumerate(self.tcoeffs):
            a = c.absprec()
            if a is None:
                continue
            e = i - self.tshift
            d = a + natural_scale(p, n, max(e, 0))
            best = d if best is None else min(best, d)
        return best

    def discrepancy(self, other: "DifElement"):
        """Rescaled valuation of self - other (None if zero at precision)."""
        diff = self - other
        p, n = self.p, self.level
        best = None
        for i, c in enumerate(diff.tcoeffs):
            if c.is_zero():
                continue
            e = i - diff.tshift
            v = c.min_valuation() + natural_scale(p, n, max(e, 0))
            best = v if best is None else min(best, v)
        return best

    def agrees(self, other: "DifElement", slack: int = 0) -> bool:
        """Agreement on every digit both sides certify, minus slack."""
        v = self.discrepancy(other)
        if v is None:
            return True
        cert = [x for x in (self.certified_digits(), other.certified_digits()) if x is not None]
        return not cert or v >= min(cert) - slack

    def __eq__(self, other):
        if not isinstance(other, DifElement):
            return NotImplemented
        return all(c.is_zero() for c in (self - other).tcoeffs)

    __hash__ = None

    def __repr__(self):
        return f"DifElement(level={self.level}, tshift={self.tshift}, {self.tcoeffs})"

    def to_json(self) -> dict:
        return {"level": self.level, "tshift": self.tshift, "tprec": self.tprec,
                "tcoeffs": [c.to_json() for c in self.tcoeffs],
                "certified_digits": self.certified_digits()}

    @classmethod
    def from_json(cls, obj: dict) -> "DifElement":
        for k in ("level", "tshift", "tcoeffs"):
            if k not in obj:
                raise ValueError(f"dif element needs key {k!r}")
        cs = [CycloElement.from_json(c) for c in obj["tcoeffs"]]
        if "tprec" in obj and obj["tprec"] != len(cs) - 1:
            raise ValueError("tprec must equal len(tcoeffs) - 1")
        return cls(obj["level"], obj["tshift"], cs)


# -- iota_n ------------------------------------------------------------------
class _IotaTable:
    """u^m = (zeta-1)^m * sum_k C(m,k) kappa^k E^k, kappa = zeta/(zeta-1)."""

    def __init__(self, p: int, n: int, L: int, wprec: int):
        self.p, self.n, self.L, self.wprec = p, n, L, wprec
        fld = field(p, n)
        self.fld = fld
        zeta = fld.zeta(wprec + 64)
        self.zm1 = zeta - 1
        self.rows: dict[int, list[CycloElement]] = {0: [fld.one(wprec + 64)] + [fld.zero()] * L}
        if n == 0:
            return
        self.zm1_inv = self.zm1.inverse()
        kappa = zeta * self.zm1_inv
        # e[k][j] = [t^j] E^k with E = sum_{r>=1} t^r / (p^(nr) r!)
        E = [Fraction(0)] + [Fraction(1, p ** (n * r) * math.factorial(r)) for r in range(1, L + 1)]
        e = [[Fraction(1)] + [Fraction(0)] * L]
        for _ in range(L):
            prev = e[-1]
            e.append([sum(prev[i] * E[j - i] for i in range(j + 1)) for j in range(L + 1)])
        kp = [fld.one(wprec + 64)]
        for _ in range(L):
            kp.append(kp[-1] * kappa)
        self.Q = [[kp[k].scale(PadicScalar.from_fraction(p, e[k][j], wprec + 64)) if e[k][j] else None
                   for j in range(L + 1)] for k in range(L + 1)]
        self.zpow = {0: fld.one(wprec + 64)}

    def _zpow(self, m: int) -> CycloElement:
        if m not in self.zpow:
            step = 1 if m > 0 else -1
            prev = self._zpow(m - step)
            self.zpow[m] = prev * (self.zm1 if m > 0 else self.zm1_inv)
        return self.zpow[m]

    def row(self, m: int) -> list[CycloElement]:
        if m in self.rows:
            return self.rows[m]
        if self.n == 0:
            if m < 0:
                raise PoleAtZero("T^(-1) has a pole at level 0")
            self.rows[m] = self._row_level0(m)
            return self.rows[m]
        zp = self._zpow(m)
        out = []
        for j in range(self.L + 1):
            acc = None
            for k in range(j + 1):
                q = self.Q[k][j]
                if q is None:
                    continue
                b = _binom_int(m, k)
                if b == 0:
                    continue
                term = q.scale(PadicScalar.from_int(self.p, b, self.wprec + 64))
                acc = term if acc is None else acc + term
            out.append(zp * acc if acc is not None else self.fld.zero())
        self.rows[m] = out
        return out

    def _row_level0(self, m: int) -> list[CycloElement]:
        # (e^t - 1)^m, rational coefficients
        L, p = self.L, self.p
        base = [Fraction(0)] + [Fraction(1, math.factorial(r)) for r in range(1, L + 1)]
        cur = [Fraction(1)] + [Fraction(0)] * L
        for _ in range(m):
            cur = [sum(cur[i] * base[j - i] for i in range(j + 1)) for j in range(L + 1)]
        return [self.fld.scalar(PadicScalar.from_fraction(p, c, self.wprec + 64)) for c in cur]


def _binom_int(m: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (m - i) // (i + 1)
    return out


_TABLES: dict = {}


def _table(p: int, n: int, L: int, wprec: int) -> _IotaTable:
    key = (p, n, L, wprec)
    if key not in _TABLES:
        _TABLES[key] = _IotaTable(p, n, L, wprec)
    return _TABLES[key]


def _hi_cap(f: LaurentWindow, n: int, j: int):
    """Coordinate valuation bound for the dropped degrees above the window."""
    if f.hi is None:
        return None
    p = f.p
    v0, kap = f.hi
    dn = degree(p, n)
    best = None
    if n == 0:
        # (e^t - 1)^m has no t^j term once m > j
        return None if f.dmax >= j else v0 - kap * ilog(max(j, 1), p) - _vfact(j, p)
    for m in range(f.dmax + 1, f.dmax + 1 + 60 * dn + 200):
        b = v0 - kap * ilog(m, p) + (m - j) // dn - n * j - _vfact(j, p)
        if best is None or b < best:
            best = b
    return best


def _lo_cap(f: LaurentWindow, n: int, j: int):
    if f.lo is None:
        return None
    p = f.p
    v0, s = f.lo
    dn = degree(p, n)
    if n == 0:
        raise PoleAtZero("a lower tail has a pole at level 0")
    if s < Fraction(1, dn):
        raise AccuracyFloorTooLow(f"lower tail slope {s} is below 1/{dn}")
    M0 = 1 - f.dmin
    return math.floor(v0 - Fraction(M0 + j, dn) - n * j - _vfact(j, p))


def iota(f: LaurentWindow, n: int, L: int = 8, min_digits=None) -> DifElement:
    """iota_n(f) in K_n[[t]]/t^(L+1), every coordinate capped at what the
    window certifies."""
    p = f.p
    wprec = f.prec + WORK_GUARD
    tab = _table(p, n, L, wprec)
    fld = tab.fld
    out = [fld.zero() for _ in range(L + 1)]
    for m, c in sorted(f.coeffs.items()):
        if c.is_exact_zero():
            continue
        row = tab.row(m)
        for j in range(L + 1):
            out[j] = out[j] + row[j].scale(c)
    capped = []
    for j in range(L + 1):
        caps = [x for x in (_hi_cap(f, n, j), _lo_cap(f, n, j)) if x is not None]
        x = out[j]
        if caps:
            x = x.cap(min(caps))
        capped.append(x)
    res = DifElement(n, 0, capped)
    if min_digits is not None:
        cd = res.certified_digits()
        if cd is not None and cd < min_digits:
            raise AccuracyFloorTooLow(f"only {cd} certified digits, {min_digits} requested")
    return res


def dif_gamma(x: DifElement, c) -> DifElement:
    """Action of the gamma with chi(gamma) = c: t -> c t, zeta -> zeta^c."""
    p, n = x.p, x.level
    if not isinstance(c, PadicScalar):
        c = PadicScalar.from_int(p, c, DEFAULT_PREC + 64)
    if c.val != 0:
        raise ValueError("chi(gamma) must be a unit")
    cmod = c.lift_int(max(n, 1)) % (p ** n) if n else 1
    out = []
    for i, a in enumerate(x.tcoeffs):
        e = i - x.tshift
        w = c ** e if e >= 0 else (1 / c) ** (-e)
        out.append(a.galois(cmod).scale(w) if n else a.scale(w))
    return DifElement(n, x.tshift, out)


def teval_zero(x: DifElement) -> CycloElement:
    if x.tshift > 0:
        x = x.canonical()
        if x.tshift > 0:
            raise PoleAtZero("element has a pole at t = 0")
    return x.tcoeffs[0]


def t_project(a: CycloElement, level: int) -> CycloElement:
    """(1/[K_m:K_level]) Tr_{K_m/K_level}."""
    if level > a.level:
        raise ValueError("target level above the source level")
    return a.project_to(level)
