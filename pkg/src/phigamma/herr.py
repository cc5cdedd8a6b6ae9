"""Herr complexes for rank-one modules, cup products, the explicit
exponential, the dual exponential and the de Rham pairing.

Coboundary questions are answered by bounded linear solves on the window:
"is a coboundary" means the solver found a preimage whose image matches at
precision; a failed solve raises NoSolutionInWindow and is inconclusive.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .cyclotomic import CycloElement
from .dif import _table, t_project, teval_zero
from .linalg import NoSolution, solve
from .padic import DEFAULT_PREC, PadicError, PadicScalar, plog, teichmuller
from .rankone import (RankOneCharacter, RankOneElement, dif_frame, mod_gamma,
                      mod_phi, mod_psi)
from .robba import LaurentWindow, reslog, series_mul, t_power


class NoSolutionInWindow(PadicError):
    pass


PHI, PSI = "phi", "psi"


def gamma_K(p: int) -> int:
    """chi(gamma_K) = 1 + p topologically generates 1 + pZ_p."""
    return 1 + p


def log_chi_gamma_K(p: int) -> PadicScalar:
    return plog(PadicScalar.from_int(p, gamma_K(p), DEFAULT_PREC + 64))


@dataclass
class Cochain:
    flavor: str
    degree: int
    entries: list

    def __post_init__(self):
        want = {0: 1, 1: 2, 2: 1}[self.degree]
        if len(self.entries) != want:
            raise ValueError(f"degree {self.degree} needs {want} entries")
        if self.flavor not in (PHI, PSI):
            raise ValueError("flavor must be 'phi' or 'psi'")

    @property
    def char(self):
        return self.entries[0].char

    def __add__(self, other):
        self._check(other)
        return Cochain(self.flavor, self.degree, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check(other)
        return Cochain(self.flavor, self.degree, [a - b for a, b in zip(self.entries, other.entries)])

    def scale(self, c):
        return Cochain(self.flavor, self.degree, [a.scale(c) for a in self.entries])

    def _check(self, other):
        if (self.flavor, self.degree) != (other.flavor, other.degree):
            raise ValueError("cochain shape mismatch")

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def to_json(self):
        return {"flavor": self.flavor, "degree": self.degree,
                "entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, obj):
        for key in ("flavor", "degree", "entries"):
            if key not in obj:
                raise ValueError(f"cochain needs key {key!r}")
        return cls(obj["flavor"], obj["degree"], [RankOneElement.from_json(e) for e in obj["entries"]])


# -- differentials -----------------------------------------------------------
def _gm1(x: RankOneElement) -> RankOneElement:
    return mod_gamma(x, gamma_K(x.p)) - x


def d1(x: RankOneElement) -> Cochain:
    return Cochain(PHI, 1, [_gm1(x), mod_phi(x) - x])


def d2(x: RankOneElement, y: RankOneElement) -> Cochain:
    return Cochain(PHI, 2, [(mod_phi(x) - x) - _gm1(y)])


def d1psi(x: RankOneElement) -> Cochain:
    return Cochain(PSI, 1, [_gm1(x), mod_psi(x) - x])


def d2psi(x: RankOneElement, y: RankOneElement) -> Cochain:
    return Cochain(PSI, 2, [(mod_psi(x) - x) - _gm1(y)])


def differential(c: Cochain) -> Cochain:
    if c.degree == 0:
        return (d1 if c.flavor == PHI else d1psi)(c.entries[0])
    if c.degree == 1:
        return (d2 if c.flavor == PHI else d2psi)(*c.entries)
    raise ValueError("no differential out of degree 2")


def to_psi_complex(c: Cochain) -> Cochain:
    """(id, id + (-psi), -psi)."""
    if c.flavor != PHI:
        raise ValueError("expected a phi-complex cochain")
    if c.degree == 0:
        return Cochain(PSI, 0, list(c.entries))
    if c.degree == 1:
        x, y = c.entries
        return Cochain(PSI, 1, [x, -mod_psi(y)])
    return Cochain(PSI, 2, [-mod_psi(c.entries[0])])


# -- Delta projector ---------------------------------------------------------
@lru_cache(maxsize=None)
def _teich(p: int, prec: int):
    return tuple(teichmuller(p, j, prec) for j in range(1, p))


def delta_project(x: RankOneElement) -> RankOneElement:
    """(1/(p-1)) sum over the Teichmuller lifts of gamma_omega."""
    p = x.p
    acc = None
    for w in _teich(p, x.f.prec + 64):
        g = mod_gamma(x, w)
        acc = g if acc is None else acc + g
    return acc.scale(PadicScalar.from_fraction(p, Fraction(1, p - 1), x.f.prec + 64))


# -- cup products ------------------------------------------------------------
def tensor(x: RankOneElement, y: RankOneElement) -> RankOneElement:
    ch = RankOneCharacter(x.char.alpha * y.char.alpha, x.char.k + y.char.k)
    return RankOneElement(ch, x.tshift + y.tshift, series_mul(x.f, y.f))


def cup01(a: RankOneElement, z: Cochain) -> Cochain:
    x, y = z.entries
    return Cochain(z.flavor, 1, [tensor(a, x), tensor(a, y)])


def cup11(z: Cochain, w: Cochain) -> Cochain:
    """[x, y] u [x', y'] = y (x) phi(x') - x (x) gamma(y')."""
    if z.flavor != PHI or w.flavor != PHI:
        raise ValueError("cup products are taken in the phi-complex")
    x, y = z.entries
    x2, y2 = w.entries
    return Cochain(PHI, 2, [tensor(y, mod_phi(x2)) - tensor(x, mod_gamma(y2, gamma_K(x.p)))])


# -- de Rham side ------------------------------------------------------------
@dataclass
class DRFrameVector:
    """c * t^(-k) e in D_dR."""
    char: RankOneCharacter
    c: PadicScalar

    @property
    def in_fil0(self) -> bool:
        # Fil^i jumps at i = -k
        return self.char.k <= 0 or self.c.is_zero()

    def to_json(self):
        return {"alpha": self.char.alpha.to_json(), "weight": self.char.k, "c": self.c.to_json(),
                "fil0": self.in_fil0}


def pair_dR(x: DRFrameVector, y: DRFrameVector) -> PadicScalar:
    """t^(-k)e (x) t^(k-1)e' = (1/t) e_1, read off the coefficient of (1/t) e_1."""
    dual = x.char.dual()
    if y.char.k != dual.k or not (y.char.alpha - dual.alpha).is_zero():
        raise ValueError("second argument must live in the dual twisted by 1")
    return x.c * y.c


# -- lift solver and the exponential -----------------------------------------
def _frame_target(x: DRFrameVector, m: int):
    """What iota_m(F) must be congruent to mod t^k for t^(-k) F e to lift x."""
    p, k = x.c.p, x.char.k
    return x.c * x.char.alpha ** m * PadicScalar.from_fraction(p, Fraction(1, p ** (m * k)) if k >= 0
                                                               else Fraction(p ** (-m * k)), DEFAULT_PREC + 64)


def lift_solver(x: DRFrameVector, levels=(1, 2), L: int = 8, shift: int = 0,
                dmin: int = -8, dmax: int = 40, prec: int = DEFAULT_PREC) -> RankOneElement:
    """x~ = t^(-k) F e with iota_m(x~) - x in D+_dif,m for m in levels.

    F runs over degrees [shift, shift + size - 1]; `shift` picks a different
    (equally valid) lift.
    """
    p, k = x.c.p, x.char.k
    if k <= 0 or x.c.is_zero():
        # x already lies in D^+_dif: the zero lift works
        return RankOneElement(x.char, 0, LaurentWindow.zero(p, prec, dmin, dmax))
    L = max(L, k)
    size = k * sum(_table(p, m, L, prec + 20).fld.d for m in levels)
    degs = list(range(shift, shift + size))
    if degs[0] < dmin or degs[-1] > dmax:
        raise NoSolutionInWindow(f"lift needs degrees {degs[0]}..{degs[-1]}; enlarge the window")
    rows, rhs = [], []
    for m in levels:
        tab = _table(p, m, L, prec + 20)
        target = _frame_target(x, m)
        for j in range(k):
            for i in range(tab.fld.d):
                rows.append([tab.row(d)[j].coords[i] for d in degs])
                want = target if (j == 0 and i == 0) else PadicScalar.zero(p)
                rhs.append(want)
    try:
        sol = solve(rows, rhs, p, prec + 20, certify=True)
    except NoSolution as exc:
        raise NoSolutionInWindow(str(exc)) from exc
    F = LaurentWindow(p, prec, dmin, dmax, {d: c for d, c in zip(degs, sol)})
    xt = RankOneElement(x.char, k, F)
    for m in levels:
        if not lift_residual_ok(xt, x, m, L):
            raise NoSolutionInWindow(f"residual polar part survives at level {m}")
    return xt


def lift_residual_ok(xt: RankOneElement, x: DRFrameVector, m: int, L: int = 8) -> bool:
    """iota_m(x~) - x has no t^j coefficient with j < k in the D_dR frame."""
    k = x.char.k
    d = dif_frame(xt, m, L)
    tol = x.c.absprec
    for e in range(-d.tshift, k):
        c = d.coeff(e)
        if e == 0:
            c = c - x.c
        if tol is not None:
            c = c.cap(tol)
        if not c.is_zero():
            return False
    return True


def exp_class(x: DRFrameVector, xt: RankOneElement | None = None, delta: bool = True,
              **kw) -> Cochain:
    """[(gamma_K - 1) x~, (phi - 1) x~]."""
    if xt is None:
        xt = lift_solver(x, **kw)
    if delta:
        xt = delta_project(xt)
    return d1(xt)


# -- coboundary solving ------------------------------------------------------
def _small(c: Cochain, slack: int) -> bool:
    # residual may keep the last `slack` certified digits (conditioning loss)
    for e in c.entries:
        for d, a in e.f.coeffs.items():
            if a.is_zero():
                continue
            if a.absprec is None or a.val < a.absprec - slack:
                return False
    return True


def _monomial(char, tshift, d, p, prec, dmin, dmax):
    return RankOneElement(char, tshift, LaurentWindow.from_dict(p, prec, dmin, dmax, {d: 1}))


def solve_preimage(target: Cochain, char: RankOneCharacter, tshift: int = 0,
                   degrees=range(-4, 21), dmin: int = -8, dmax: int = 40,
                   prec: int = DEFAULT_PREC, slack: int = 2, levels=(1, 2),
                   L: int = 8) -> Cochain:
    """A cochain w of degree target.degree - 1 with differential(w) = target,
    searched among t^(-tshift) * (Laurent polynomial on `degrees`) entries.

    With tshift > 0 the entries must stay in the module at every level in
    `levels`: iota_m of each entry gets no polar part in t.
    """
    p = char.p
    src_deg = target.degree - 1
    if src_deg < 0:
        raise ValueError("degree-0 cochains have no preimage")
    nsrc = 1 if src_deg == 0 else 2
    zero = RankOneElement(char, tshift, LaurentWindow.zero(p, prec, dmin, dmax))
    cols = []
    for slot in range(nsrc):
        for d in degrees:
            ents = [zero] * nsrc
            ents[slot] = _monomial(char, tshift, d, p, prec + 40, dmin, dmax)
            cols.append(differential(Cochain(target.flavor, src_deg, ents)))
    rows, rhs = [], []
    for e, tgt in enumerate(target.entries):
        j = max([tgt.tshift] + [c.entries[e].tshift for c in cols])
        tf = tgt.with_shift(j).f
        cf = [c.entries[e].with_shift(j).f for c in cols]
        lo = max([tf.dmin] + [f.dmin for f in cf])
        hi = min([tf.dmax] + [f.dmax for f in cf])
        for d in range(lo, hi + 1):
            rows.append([f.coeffs.get(d, PadicScalar.zero(p)) for f in cf])
            rhs.append(tf.coeffs.get(d, PadicScalar.zero(p)))
    if tshift > 0:
        ncol = len(cols)
        # the polar conditions are demanded to the target's own precision
        tabs = [c.absprec for e in target.entries for c in e.f.coeffs.values() if c.absprec is not None]
        zero_s = PadicScalar.zero(p, min(tabs) if tabs else None)
        for slot in range(nsrc):
            for m in levels:
                tab = _table(p, m, max(L, tshift), prec + 40)
                for j in range(tshift):
                    for i in range(tab.fld.d):
                        row = [PadicScalar.zero(p)] * ncol
                        for n, d in enumerate(degrees):
                            row[slot * len(degrees) + n] = tab.row(d)[j].coords[i]
                        rows.append(row)
                        rhs.append(zero_s)
    try:
        sol = solve(rows, rhs, p, prec + 40, certify=True)
    except NoSolution as exc:
        raise NoSolutionInWindow(str(exc)) from exc
    ents = []
    ndeg = len(degrees)
    for slot in range(nsrc):
        coeffs = {d: c for d, c in zip(degrees, sol[slot * ndeg:(slot + 1) * ndeg])}
        ents.append(RankOneElement(char, tshift, LaurentWindow(p, prec + 40, dmin, dmax, coeffs)))
    w = Cochain(target.flavor, src_deg, ents)
    if not _small(differential(w) - target, slack):
        raise NoSolutionInWindow("candidate preimage leaves a residual")
    return w


def lift_independence(x: DRFrameVector, xt: RankOneElement, xt2: RankOneElement,
                      levels=(1, 2), dmin: int = -8, dmax: int = 40, slack: int = 2) -> Cochain:
    """A preimage w with d1(p_Delta w) = exp_class(x, xt) - exp_class(x, xt2).

    The solve runs before the Delta projection, where a lift difference is a
    finite Laurent polynomial; the projected relation is then checked
    directly.  Raises NoSolutionInWindow when either step fails.
    """
    diff = exp_class(x, xt, delta=False) - exp_class(x, xt2, delta=False)
    js = max(xt.tshift, xt2.tshift)
    w = solve_preimage(diff, x.char, tshift=js, degrees=range(dmin, dmax + 1),
                       dmin=dmin, dmax=dmax, slack=slack, levels=levels)
    proj = d1(delta_project(w.entries[0])) - (exp_class(x, xt) - exp_class(x, xt2))
    if not _small(proj, slack):
        raise NoSolutionInWindow("projected preimage leaves a residual")
    return w


def is_coboundary(target: Cochain, char: RankOneCharacter, **kw) -> bool:
    try:
        solve_preimage(target, char, **kw)
        return True
    except NoSolutionInWindow:
        return False


# -- g_D and the dual exponential --------------------------------------------
def g_class(x: DRFrameVector, n: int = 1, L: int = 8):
    """log chi(gamma_K) * x as a Gamma-cocycle value in D_dif,n (frame t^(-k) e)."""
    from .dif import DifElement
    from .cyclotomic import field
    fld = field(x.c.p, n)
    c = fld.scalar(x.c * log_chi_gamma_K(x.c.p))
    return DifElement.constant(c, L)


def dual_exp(z: Cochain, n: int = 1, L: int = 8) -> DRFrameVector:
    """Keep the Gamma-invariant line of iota_n(x-entry) and divide by log chi(gamma_K)."""
    if z.degree != 1:
        raise ValueError("dual exponential takes a degree-1 cochain")
    x = z.entries[0]
    d = dif_frame(x, n, L)
    # invariant line: t^0 coefficient in the t^(-k) e frame, averaged over Galois
    try:
        c0 = teval_zero(d)
    except PadicError:
        c0 = d.coeff(0)
    inv = t_project(c0, 0).coords[0]
    return DRFrameVector(x.char, inv / log_chi_gamma_K(x.p))


def dif_invariant_part(d, level: int = 0) -> CycloElement:
    return t_project(d.coeff(0), level)


# -- the H^2 functional --------------------------------------------------------
@lru_cache(maxsize=None)
def _E_power(d: int, top: int) -> tuple:
    """Coefficients of ((e^t - 1)/t)^d up to t^top, exact rationals."""
    import math
    E = [Fraction(1, math.factorial(r + 1)) for r in range(top + 1)]
    if d < 0:
        inv = [Fraction(1)] + [Fraction(0)] * top
        for i in range(1, top + 1):
            inv[i] = -sum(E[r] * inv[i - r] for r in range(1, i + 1))
        E, d = inv, -d
    out = [Fraction(1)] + [Fraction(0)] * top
    for _ in range(d):
        out = [sum(out[i] * E[j - i] for i in range(j + 1)) for j in range(top + 1)]
    return tuple(out)


def h2_functional(x: RankOneElement) -> PadicScalar:
    """Residue of t^(-j) V dt on psi-complex degree-2 representatives of
    B(1), i.e. [t^(j-1)] V(e^t - 1); for j = 0 this is reslog."""
    if x.char.k != 1 or not (x.char.alpha - 1).is_zero():
        raise ValueError("h2 functional is defined on B(1)")
    if x.tshift == 0:
        return reslog(x.f)
    j = x.tshift
    V = x.f
    if j < 0:
        V = series_mul(t_power(V.p, -j, V.prec, V.dmax, V.dmin), V)
        return reslog(V)
    if V.lo is not None:
        raise PadicError("h2 of a t-shifted element needs an exact negative part")
    p = V.p
    acc = PadicScalar.zero(p)
    for d, c in V.coeffs.items():
        e = j - 1 - d
        if e < 0:
            continue
        coef = _E_power(d, e)[e]
        if coef:
            acc = acc + c * PadicScalar.from_fraction(p, coef, V.prec + 64)
    if V.hi is not None and V.dmax < j - 1:
        raise PadicError("window too short for the requested residue")
    return acc


def adjoint_pair(x: DRFrameVector, z: Cochain, n: int = 1, L: int = 8):
    """(<exp x, z>, [x, exp* z]_dR): the residue pairing of exp_class(x) with a
    cocycle z of the twisted dual, next to the de Rham pairing."""
    if z.flavor != PHI or z.degree != 1:
        raise ValueError("z must be a degree-1 phi-complex cocycle")
    cup = cup11(exp_class(x), z)
    lhs = h2_functional(to_psi_complex(cup).entries[0])
    rhs = pair_dR(x, dual_exp(z, n, L))
    return lhs, rhs
