"""Rank-one modules D(alpha, k) = B e with phi(e) = alpha e and
gamma(e) = chi(gamma)^k e, their N_rig, and the big exponential map."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import CycloElement
from .dif import DifElement, iota, t_project, teval_zero
from .padic import DEFAULT_PREC, PadicError, PadicScalar, ilog, log0, plog
from .robba import (LaurentWindow, series_weight, gamma, nabla, partial, phi, psi,
                    series_mul, t_power, t_series)


class NotPsiFixed(PadicError):
    pass


class NotInNrig(PadicError):
    pass


class HTooSmall(PadicError):
    pass


class SeriesNotConverged(PadicError):
    pass


def _scalar(p: int, x, prec: int = DEFAULT_PREC + 64) -> PadicScalar:
    if isinstance(x, PadicScalar):
        return x
    return PadicScalar.from_fraction(p, Fraction(x), prec)


@dataclass(frozen=True)
class RankOneCharacter:
    alpha: PadicScalar
    k: int

    def __post_init__(self):
        if self.alpha.is_zero():
            raise ValueError("alpha must be nonzero at precision")

    @classmethod
    def make(cls, p: int, alpha, k: int) -> "RankOneCharacter":
        return cls(_scalar(p, alpha), k)

    @property
    def p(self):
        return self.alpha.p

    def twist(self, r: int) -> "RankOneCharacter":
        return RankOneCharacter(self.alpha, self.k + r)

    def dual(self) -> "RankOneCharacter":
        """Character of Hom(D, R(1)) = D(alpha^-1, 1-k)."""
        return RankOneCharacter(1 / self.alpha, 1 - self.k)

    def to_json(self):
        return {"alpha": self.alpha.to_json(), "weight": self.k}


class RankOneElement:
    """t^(-tshift) * f * e."""

    __slots__ = ("char", "tshift", "f")

    def __init__(self, char: RankOneCharacter, tshift: int, f: LaurentWindow):
        if f.p != char.p:
            raise ValueError("prime mismatch")
        self.char, self.tshift, self.f = char, tshift, f

    @property
    def p(self):
        return self.f.p

    def with_shift(self, j: int) -> "RankOneElement":
        """Same element written as t^(-j) * F * e (needs j >= tshift)."""
        if j < self.tshift:
            raise ValueError("cannot lower the t-shift without division")
        if j == self.tshift:
            return self
        f = self.f
        F = series_mul(t_power(f.p, j - self.tshift, f.prec, f.dmax, f.dmin), f)
        return RankOneElement(self.char, j, F)

    def _align(self, other):
        if other.char != self.char:
            raise ValueError("character mismatch")
        j = max(self.tshift, other.tshift)
        return j, self.with_shift(j).f, other.with_shift(j).f

    def __add__(self, other):
        j, a, b = self._align(other)
        return RankOneElement(self.char, j, a + b)

    def __sub__(self, other):
        j, a, b = self._align(other)
        return RankOneElement(self.char, j, a - b)

    def __neg__(self):
        return RankOneElement(self.char, self.tshift, -self.f)

    def scale(self, c) -> "RankOneElement":
        return RankOneElement(self.char, self.tshift, self.f.scale(c))

    def relabel(self, char: RankOneCharacter) -> "RankOneElement":
        return RankOneElement(char, self.tshift, self.f)

    def is_zero(self) -> bool:
        return self.f.is_zero()

    def __eq__(self, other):
        if not isinstance(other, RankOneElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"RankOneElement(alpha={self.char.alpha}, k={self.char.k}, tshift={self.tshift}, f={self.f})"

    def to_json(self):
        return {"alpha": self.char.alpha.to_json(), "weight": self.char.k,
                "tshift": self.tshift, "f": self.f.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "RankOneElement":
        for key in ("alpha", "weight", "tshift", "f"):
            if key not in obj:
                raise ValueError(f"rank-one element needs key {key!r}")
        f = LaurentWindow.from_json(obj["f"])
        alpha = PadicScalar.from_json(f.p, obj["alpha"])
        if not isinstance(obj["weight"], int) or not isinstance(obj["tshift"], int):
            raise ValueError("weight and tshift must be integers")
        return cls(RankOneCharacter(alpha, obj["weight"]), obj["tshift"], f)


# -- module operators --------------------------------------------------------
def mod_phi(x: RankOneElement) -> RankOneElement:
    p, j = x.p, x.tshift
    c = x.char.alpha * _scalar(p, Fraction(1, p**j) if j >= 0 else p ** (-j))
    return RankOneElement(x.char, j, phi(x.f).scale(c))


def mod_psi(x: RankOneElement) -> RankOneElement:
    p, j = x.p, x.tshift
    c = _scalar(p, Fraction(p**j) if j >= 0 else Fraction(1, p ** (-j))) / x.char.alpha
    return RankOneElement(x.char, j, psi(x.f).scale(c))


def mod_gamma(x: RankOneElement, a) -> RankOneElement:
    p = x.p
    a_s = _scalar(p, a)
    return RankOneElement(x.char, x.tshift, gamma(x.f, a).scale(a_s ** (x.char.k - x.tshift)))


def mod_nabla(x: RankOneElement, i: int = 0) -> RankOneElement:
    """nabla_i(t^-j f e) = t^-j (nabla_0 f + (k - j - i) f) e."""
    w = x.char.k - x.tshift - i
    return RankOneElement(x.char, x.tshift, nabla(x.f, -w))


def is_psi_fixed(x: RankOneElement) -> bool:
    return mod_psi(x) == x


# -- N_rig ---------------------------------------------------------------
def nrig(char: RankOneCharacter) -> dict:
    return {"module": "N_rig", "basis": f"t^(-{char.k}) e", "tshift": char.k,
            "description": "t^(-k) * Robba * e"}


def dif_frame(x: RankOneElement, m: int, L: int = 8) -> DifElement:
    """iota_m(x) written in the basis t^(-k) e of D_dR:
    alpha^(-m) p^(mj) t^(k-j) iota_m(f)."""
    p, j, k = x.p, x.tshift, x.char.k
    d = iota(x.f, m, L)
    c = (1 / x.char.alpha) ** m * _scalar(p, Fraction(p) ** (m * j))
    return d.scale(c).tshift_by(k - j) if k - j >= 0 else \
        DifElement(d.level, j - k, d.tcoeffs).scale(c)


def nrig_check(x: RankOneElement, levels=(1, 2), L: int = 8) -> bool:
    """Membership in N_rig: no pole in the D_dR frame at any tested level."""
    if x.tshift <= x.char.k:
        return True
    for m in levels:
        d = dif_frame(x, m, L).canonical()
        if d.tshift > 0:
            return False
    return True


def _to_nrig_frame(x: RankOneElement) -> RankOneElement:
    k = x.char.k
    if x.tshift > k:
        if not nrig_check(x):
            raise NotInNrig(f"t-shift {x.tshift} exceeds weight {k}")
        raise NotInNrig("t-divisible numerators are not normalized; divide by t first")
    return x.with_shift(k)


def nabla_chain(x: RankOneElement, h: int, check: bool = True) -> RankOneElement:
    """nabla_{h-1} ... nabla_0 (x), returned as an element of D (tshift 0)."""
    k = x.char.k
    if h < max(1, k):
        raise HTooSmall(f"need h >= max(1, {k})")
    y = _to_nrig_frame(x)
    F = y.f
    # t^h d^h F, which the product of the nabla_i must equal
    dF = F
    for _ in range(h):
        dF = partial(dF)
    if check:
        G = F
        for i in range(h):
            G = nabla(G, i)
        target = series_mul(t_power(F.p, h, F.prec, max(dF.dmax, 1), dF.dmin), dF)
        if not (G - target).is_zero():
            raise NotInNrig("nabla chain is not divisible by t^h")
    out = dF if h == k else series_mul(t_power(F.p, h - k, F.prec, max(dF.dmax, 1), dF.dmin), dF)
    return RankOneElement(x.char, 0, out)


def tilde_partial(x: RankOneElement) -> RankOneElement:
    """nabla_0(x) tensor e_{-1}: lands in N_rig(D(-1))."""
    y = _to_nrig_frame(x)
    return RankOneElement(x.char.twist(-1), y.tshift - 1, partial(y.f))


# -- big exponential ----------------------------------------------------
def chi_gamma_n(p: int, n: int, prec: int = DEFAULT_PREC + 64) -> PadicScalar:
    """chi(gamma_n) = (1+p)^(p^(n-1))."""
    return PadicScalar.from_int(p, (1 + p) ** (p ** (n - 1)), prec)


def log_chi_gamma_n(p: int, n: int) -> PadicScalar:
    return plog(chi_gamma_n(p, n))


def m_of_level(p: int, n: int) -> int:
    """min v_p(log chi(gamma)) over Gamma_{K_n}, attained at gamma_n."""
    return log_chi_gamma_n(p, n).val


def iwasawa_normalization(p: int) -> PadicScalar:
    """|Gamma_tors| * log_0(chi(gamma_K))."""
    return log0(PadicScalar.from_int(p, 1 + p, DEFAULT_PREC + 64)) * (p - 1)


@dataclass
class IwasawaClass:
    char: RankOneCharacter
    h: int
    y: RankOneElement
    normalization: PadicScalar

    def project_level(self, n: int):
        """pr_{K_n}(y) = [log_0(chi(gamma_n)) y, 0] as a psi-complex cochain."""
        c = log0(chi_gamma_n(self.y.p, n))
        z = RankOneElement(self.char, 0, self.y.f.like({}))
        return (self.y.scale(c), z)

    def to_json(self):
        return {"weight": self.char.k, "alpha": self.char.alpha.to_json(), "h": self.h,
                "y": self.y.to_json(), "normalization": self.normalization.to_json()}


def big_exp(x: RankOneElement, h: int) -> IwasawaClass:
    if not is_psi_fixed(x):
        raise NotPsiFixed("input is not fixed by psi at precision")
    y = nabla_chain(x, h)
    return IwasawaClass(x.char, h, y, iwasawa_normalization(x.p))


def T_L_project(x: RankOneElement, level: int, m: int | None = None, L: int = 8) -> CycloElement:
    """iota_m, frame change, t -> 0, then normalized trace down to `level`."""
    m = level if m is None else m
    if m < max(level, 1):
        raise ValueError("need m >= max(level, 1)")
    y = _to_nrig_frame(x)
    d = dif_frame(y, m, L)
    return t_project(teval_zero(d), level)


# -- interpolation identity ---------------------------------------------
def _log_gamma_ratio(x: RankOneElement, n: int, terms: int | None):
    """(nabla_0/(gamma_n - 1)) x = (1/log chi) sum_{k>=1} (-1)^(k-1)/k (gamma_n - 1)^(k-1) x."""
    p = x.p
    a = chi_gamma_n(p, n)
    lc = plog(a)
    f = x.f
    w0 = series_weight(f)
    r = Fraction(1, p - 1)
    prec = f.prec
    if terms is None:
        terms = 1
        while w0 + n * terms - ilog(terms + 1, p) - lc.val - max(f.dmax, 0) * r < prec + 1:
            terms += 1
            if terms > 400:
                raise SeriesNotConverged("gamma_n series does not reach the working precision")
    acc = x
    cur = x
    for k in range(2, terms + 1):
        cur = mod_gamma(cur, a) - cur
        c = _scalar(p, Fraction((-1) ** (k - 1), k))
        acc = acc + cur.scale(c)
    out = acc.scale(1 / lc)
    # remainder from k = terms + 1 on, at degree d
    k = terms + 1
    rest = w0 + n * (k - 1) - ilog(k, p) - lc.val
    g = out.f
    capped = {d: c.cap(int(-(-(rest - d * r) // 1))) for d, c in g.coeffs.items()}
    for d in range(g.dmin, g.dmax + 1):
        if d not in capped:
            capped[d] = PadicScalar.zero(p, int(-(-(rest - d * r) // 1)))
    return RankOneElement(out.char, out.tshift, g.like(capped, hi=g.hi, lo=g.lo))


def interpolation_identity_check(x: RankOneElement, h: int, n: int, L: int = 8,
                                 terms: int | None = None, slack: int = 2) -> dict:
    """Constant term of iota_n(x~) against (-1)^(h-1)(h-1)!/log chi(gamma_n) T_{K_n}(x)
    for weight 0, plus the t^h-divisibility of (phi - 1) x~ at level n+1."""
    if x.char.k != 0 or x.tshift != 0:
        raise ValueError("the constant-term identity is checked for weight 0 only")
    if not is_psi_fixed(x):
        raise NotPsiFixed("input is not fixed by psi at precision")
    p = x.p
    xt = _log_gamma_ratio(x, n, terms)
    for i in range(1, h):
        xt = mod_nabla(xt, i)
    lhs = teval_zero(dif_frame(xt, n, L))
    lc = log_chi_gamma_n(p, n)
    fact = 1
    for i in range(1, h):
        fact *= i
    c = _scalar(p, (-1) ** (h - 1) * fact) / lc
    # T_{K_n} through level n+1 so the psi-invariance is actually used
    rhs = T_L_project(x, n, m=n + 1, L=L).scale(c)
    diff = lhs - rhs
    vals = [a.val for a in diff.coords if not a.is_zero()]
    disc = min(vals) if vals else None
    cert = [a for a in (lhs.absprec(), rhs.absprec()) if a is not None]
    cert = min(cert) if cert else None
    # (phi - 1) x~ must vanish to order h at level n+1
    y = mod_phi(xt) - xt
    d = dif_frame(y, n + 1, L)
    low = [d.coeff(e) for e in range(0, h)]
    order_ok = all(a.is_zero() for a in low)
    ok = (disc is None or cert is None or disc >= cert - slack) and order_ok
    return {"ok": ok, "h": h, "n": n, "lhs": lhs, "rhs": rhs, "discrepancy": disc,
            "certified_digits": cert, "phi_minus_one_t_order_ok": order_ok,
            "dif_certified_digits": d.certified_digits()}


# -- fixtures ---------------------------------------------------------------
def cyclotomic_fixture(p: int, prec: int = DEFAULT_PREC, dmin: int = -8, dmax: int = 40) -> LaurentWindow:
    """(1+T)/T, fixed by psi."""
    return LaurentWindow.from_dict(p, prec, dmin, dmax, {-1: 1, 0: 1})


def psi_fixed_series(p: int, coeffs, units, prec: int = DEFAULT_PREC,
                     dmin: int = -8, dmax: int = 40) -> LaurentWindow:
    """c_0 + sum_i c_i gamma_{a_i}((1+T)/T): psi commutes with gamma."""
    base = cyclotomic_fixture(p, prec, dmin, dmax)
    out = LaurentWindow.from_dict(p, prec, dmin, dmax, {0: coeffs[0]})
    for c, a in zip(coeffs[1:], units):
        out = out + gamma(base, a).scale(_scalar(p, c))
    return out


def random_psi_fixed(char: RankOneCharacter, rng, prec: int = DEFAULT_PREC,
                     dmin: int = -8, dmax: int = 40, pieces: int = 2) -> RankOneElement:
    """A psi-fixed element of N_rig(D(1, k)), written with t-shift 0."""
    p = char.p
    if not (char.alpha - 1).is_zero():
        raise ValueError("constructed psi-fixed fixtures need alpha = 1")
    coeffs = [rng.randrange(p**prec) for _ in range(pieces + 1)]
    units = []
    while len(units) < pieces:
        a = rng.randrange(1, p**prec)
        if a % p:
            units.append(a)
    g = psi_fixed_series(p, coeffs, units, prec, dmin, dmax)
    return RankOneElement(char, 0, g)
