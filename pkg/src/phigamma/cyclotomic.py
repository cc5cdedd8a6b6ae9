"""The tower K_n = Q_p(zeta_{p^n}) in power-basis coordinates."""
from __future__ import annotations

from functools import lru_cache

from .padic import DivisionByZero, PadicError, PadicScalar


class NonInvertible(PadicError):
    pass


def degree(p: int, n: int) -> int:
    return 1 if n == 0 else (p - 1) * p ** (n - 1)


class CycloField:
    """Q_p(zeta) with zeta a root of Phi_{p^n}; zeta = 1 at level 0."""

    def __init__(self, p: int, n: int):
        if n < 0:
            raise ValueError("level must be >= 0")
        self.p, self.n = p, n
        self.d = degree(p, n)
        self.order = p**n
        # integer coordinates of zeta^e for 0 <= e < p^n
        self.powers = self._power_table()

    def _power_table(self) -> list[list[int]]:
        d, q = self.d, self.order
        if self.n == 0:
            return [[1]]
        step = q // self.p
        table = []
        cur = [1] + [0] * (d - 1)
        for _ in range(q):
            table.append(cur)
            nxt = [0] + cur[:-1]
            top = cur[-1]
            if top:
                # X^d = -sum_{i<p-1} X^{i p^{n-1}}
                for i in range(self.p - 1):
                    nxt[i * step] -= top
            cur = nxt
        return table

    def __eq__(self, other):
        return isinstance(other, CycloField) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return f"CycloField(p={self.p}, n={self.n})"

    def element(self, coords) -> "CycloElement":
        return CycloElement(self, list(coords))

    def zero(self) -> "CycloElement":
        return CycloElement(self, [PadicScalar.zero(self.p)] * self.d)

    def scalar(self, c: PadicScalar) -> "CycloElement":
        return CycloElement(self, [c] + [PadicScalar.zero(self.p)] * (self.d - 1))

    def one(self, prec: int = 12) -> "CycloElement":
        return self.scalar(PadicScalar.from_int(self.p, 1, prec))

    def zeta_power(self, e: int, prec: int = 12) -> "CycloElement":
        vec = self.powers[e % self.order]
        return CycloElement(self, [PadicScalar.from_int(self.p, c, prec) for c in vec])

    def zeta(self, prec: int = 12) -> "CycloElement":
        return self.zeta_power(1, prec)


@lru_cache(maxsize=None)
def field(p: int, n: int) -> CycloField:
    return CycloField(p, n)


class CycloElement:
    __slots__ = ("field", "coords")

    def __init__(self, fld: CycloField, coords: list[PadicScalar]):
        if len(coords) != fld.d:
            raise ValueError("coordinate count must equal the field degree")
        self.field = fld
        self.coords = coords

    @property
    def p(self):
        return self.field.p

    @property
    def level(self):
        return self.field.n

    def _check(self, other):
        if not isinstance(other, CycloElement):
            raise TypeError("expected CycloElement")
        if other.field != self.field:
            raise ValueError("field mismatch")

    def __add__(self, other):
        if isinstance(other, (PadicScalar, int)):
            other = self.field.scalar(self.coords[0].coerce(other))
        self._check(other)
        return CycloElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CycloElement":
        return CycloElement(self.field, [a * c for a in self.coords])

    def __mul__(self, other):
        if not isinstance(other, CycloElement):
            return self.scale(other)
        self._check(other)
        fld, p = self.field, self.p
        d = fld.d
        if d == 1:
            return CycloElement(fld, [self.coords[0] * other.coords[0]])
        raw = [PadicScalar.zero(p)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coords):
                if b.is_exact_zero():
                    continue
                raw[i + j] = raw[i + j] + a * b
        return _reduce(fld, raw)

    def __rmul__(self, other):
        return self.scale(other)

    def galois(self, c: int) -> "CycloElement":
        """zeta -> zeta^c."""
        fld = self.field
        if c % fld.p == 0:
            raise ValueError("galois exponent must be a unit")
        if fld.n == 0:
            return self
        raw = [PadicScalar.zero(self.p)] * fld.d
        for i, a in enumerate(self.coords):
            if a.is_exact_zero():
                continue
            for k, m in enumerate(fld.powers[(i * c) % fld.order]):
                if m:
                    raw[k] = raw[k] + a * m
        return CycloElement(fld, raw)

    def norm(self) -> PadicScalar:
        return _norm_and_cofactor(self)[0]

    def inverse(self) -> "CycloElement":
        nrm, co = _norm_and_cofactor(self)
        if nrm.is_zero():
            raise NonInvertible("norm vanishes at precision")
        try:
            return co.scale(1 / nrm)
        except DivisionByZero as exc:
            raise NonInvertible(str(exc)) from exc

    def __truediv__(self, other):
        if isinstance(other, CycloElement):
            return self * other.inverse()
        return self.scale(1 / self.coords[0].coerce(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one(_prec_of(self))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, PadicScalar)):
            other = self.field.scalar(self.coords[0].coerce(other))
        if not isinstance(other, CycloElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def min_valuation(self):
        """Minimum coordinate valuation (None if every coordinate is zero)."""
        vs = [a.val for a in self.coords if a.val is not None]
        return min(vs) if vs else None

    def absprec(self):
        """Minimum absolute precision over coordinates (None if exact)."""
        ps = [a.absprec for a in self.coords if a.absprec is not None]
        return min(ps) if ps else None

    def cap(self, absprec) -> "CycloElement":
        return CycloElement(self.field, [a.cap(absprec) for a in self.coords])

    # -- tower maps -----------------------------------------------------
    def embed_up(self) -> "CycloElement":
        up = field(self.p, self.level + 1)
        z = PadicScalar.zero(self.p)
        coords = [z] * up.d
        step = 1 if self.level == 0 else self.p
        for i, a in enumerate(self.coords):
            coords[i * step] = a
        return CycloElement(up, coords)

    def trace_down(self) -> "CycloElement":
        """Tr_{K_n/K_{n-1}}."""
        n, p = self.level, self.p
        if n == 0:
            raise ValueError("no level below 0")
        if n == 1:
            conj = [c for c in range(1, p)]
        else:
            q = p ** (n - 1)
            conj = [1 + j * q for j in range(p)]
        acc = self.galois(conj[0])
        for c in conj[1:]:
            acc = acc + self.galois(c)
        return _descend(acc)

    def normalized_trace(self) -> "CycloElement":
        """(1/p) Tr_{K_n/K_{n-1}}: the map realizing psi on coefficients."""
        return self.trace_down().scale(PadicScalar.from_fraction(self.p, 1, 80) / self.p)

    def trace_to(self, level: int) -> "CycloElement":
        x = self
        while x.level > level:
            x = x.trace_down()
        return x

    def project_to(self, level: int) -> "CycloElement":
        """(1/[K_n:K_level]) Tr_{K_n/K_level}."""
        deg = self.field.d // degree(self.p, level)
        return self.trace_to(level).scale(PadicScalar.from_fraction(self.p, 1, 80) / deg)

    def to_json(self) -> dict:
        return {"p": self.p, "level": self.level, "coords": [a.to_json() for a in self.coords]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycloElement":
        p, n = obj["p"], obj["level"]
        fld = field(p, n)
        return cls(fld, [PadicScalar.from_json(p, c) for c in obj["coords"]])

    def __repr__(self):
        return f"CycloElement(level={self.level}, {self.coords})"


def _prec_of(x: CycloElement) -> int:
    ps = [a.prec for a in x.coords if a.val is not None]
    return max(ps) if ps else 12


def _reduce(fld: CycloField, raw: list[PadicScalar]) -> CycloElement:
    d = fld.d
    out = list(raw[:d])
    for e in range(d, len(raw)):
        a = raw[e]
        if a.is_exact_zero():
            continue
        for k, m in enumerate(fld.powers[e % fld.order]):
            if m:
                out[k] = out[k] + a * m
    return CycloElement(fld, out)


def _descend(x: CycloElement) -> CycloElement:
    """Coordinates of an element of K_{n-1} sitting inside K_n."""
    n, p = x.level, x.p
    low = field(p, n - 1)
    step = 1 if n == 1 else p
    return CycloElement(low, [x.coords[i * step] for i in range(low.d)])


def _norm_and_cofactor(x: CycloElement):
    fld = x.field
    if fld.n == 0:
        return x.coords[0], fld.one(_prec_of(x))
    units = [c for c in range(2, fld.order) if c % fld.p]
    co = None
    for c in units:
        g = x.galois(c)
        co = g if co is None else co * g
    if co is None:
        co = fld.one(_prec_of(x))
    nrm = (x * co).coords[0]
    return nrm, co
