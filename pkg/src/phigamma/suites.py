"""Verification batteries: one per module, plus the numbered acceptance
criteria.  Every case is seeded from SuiteConfig.seed and the case name, so
reports are reproducible byte for byte.
"""
from __future__ import annotations

import json
import random
import zlib
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

from . import KERNEL_VERSION
from .cyclotomic import field
from .dif import dif_gamma, iota
from .fourier import (LocAnFunction, col_preimage, colmez, la_gamma, la_phi, la_psi,
                      monomial)
from .herr import (PHI, gamma_K, Cochain, DRFrameVector, NoSolutionInWindow, adjoint_pair,
                   cup01, cup11, d1, d1psi, d2, d2psi, differential, dual_exp,
                   exp_class, g_class, h2_functional, lift_independence, lift_solver,
                   log_chi_gamma_K, pair_dR, solve_preimage, tensor, to_psi_complex)
from .padic import PadicError, PadicScalar, binom, plog
from .rankone import (RankOneCharacter, RankOneElement, big_exp, cyclotomic_fixture,
                      interpolation_identity_check, is_psi_fixed, log_chi_gamma_n, mod_gamma,
                      m_of_level, mod_nabla, mod_psi, nabla_chain, nrig_check,
                      random_psi_fixed, tilde_partial)
from .robba import (LaurentWindow, gamma, nabla, partial, phi, psi, reslog,
                    series_mul, t_power, t_series)

SUITES = ("padic", "cyclo", "robba", "dif", "herr", "bigexp", "fourier")


# -- configuration and reports ------------------------------------------------
@dataclass
class SuiteConfig:
    p: int = 3
    N: int = 12
    dmin: int = -8
    dmax: int = 40
    L: int = 8
    n_max: int = 2
    trials: int = 100
    seed: int = 42
    s: int = 2

    def __post_init__(self):
        if self.p < 3 or any(self.p % q == 0 for q in range(2, int(self.p ** 0.5) + 1)):
            raise ValueError("p must be an odd prime")
        if not self.dmin <= 0 <= self.dmax:
            raise ValueError("window must contain degree 0")
        if self.N < 1 or self.L < 1 or self.n_max < 1 or self.trials < 1 or self.s < 0:
            raise ValueError("N, L, n_max, trials must be positive and s non-negative")

    @property
    def window(self):
        return (self.dmin, self.dmax)

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "window": [self.dmin, self.dmax], "L": self.L,
                "n_max": self.n_max, "trials": self.trials, "seed": self.seed, "s": self.s}

    @classmethod
    def from_json(cls, obj: dict) -> "SuiteConfig":
        known = {"p", "N", "window", "L", "n_max", "trials", "seed", "s"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        kw = {k: obj[k] for k in known - {"window"} if k in obj}
        for k, v in kw.items():
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"config key {k!r} must be an integer")
        if "window" in obj:
            w = obj["window"]
            if not (isinstance(w, list) and len(w) == 2 and all(isinstance(v, int) for v in w)):
                raise ValueError("window must be [dmin, dmax]")
            kw["dmin"], kw["dmax"] = w
        return cls(**kw)

    def rng(self, name: str) -> random.Random:
        return random.Random(self.seed * 1000003 + zlib.crc32(name.encode()))


PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass
class CaseRecord:
    name: str
    params: dict
    status: str
    discrepancy: int | None = None
    certified_digits: int | None = None
    ledger: list = dc_field(default_factory=list)
    inputs: list = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    suite: str
    cases: list
    config: SuiteConfig
    kernel_version: str = KERNEL_VERSION

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.cases)

    @property
    def inconclusive(self) -> bool:
        return any(c.status == INCONCLUSIVE for c in self.cases)

    def to_json(self) -> dict:
        return {"suite": self.suite, "kernel_version": self.kernel_version,
                "config": self.config.to_json(), "pass": self.passed,
                "cases": [c.to_json() for c in sorted(self.cases, key=lambda c: c.name)]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, default=str)


class _Probe:
    """Collects the checks of one case: the worst discrepancy valuation seen,
    the fewest certified digits, and the inputs of the first failures."""

    MAX_INPUTS = 3

    def __init__(self, name: str, **params):
        self.name, self.params = name, params
        self.failed = False
        self.unsure = False
        self.disc = None
        self.cert = None
        self.ledger: list[str] = []
        self.inputs: list = []

    def _fold(self, disc, cert):
        if disc is not None:
            self.disc = disc if self.disc is None else min(self.disc, disc)
        if cert is not None:
            self.cert = cert if self.cert is None else min(self.cert, cert)

    def check(self, ok: bool, disc=None, cert=None, inputs=None, note=None):
        self._fold(disc, cert)
        if not ok:
            self.failed = True
            if note and note not in self.ledger:
                self.ledger.append(note)
            if inputs is not None and len(self.inputs) < self.MAX_INPUTS:
                self.inputs.append(inputs)
        return ok

    def unknown(self, why: str, inputs=None):
        self.unsure = True
        if why not in self.ledger:
            self.ledger.append(why)
        if inputs is not None and len(self.inputs) < self.MAX_INPUTS:
            self.inputs.append(inputs)

    def note(self, text: str):
        if text not in self.ledger:
            self.ledger.append(text)

    def record(self) -> CaseRecord:
        status = FAIL if self.failed else (INCONCLUSIVE if self.unsure else PASS)
        return CaseRecord(self.name, self.params, status, _intish(self.disc), _intish(self.cert),
                          self.ledger, self.inputs)


def _intish(x):
    if x is None:
        return None
    return int(x) if Fraction(x).denominator == 1 else str(x)


def _cmp(a, b, band=None):
    """(zero?, least valuation of a - b, certified digits) for windows,
    scalars or locally analytic functions.  For windows the digits are read
    on the degree band, since precision decays toward the window edges."""
    d = a - b
    if isinstance(d, LaurentWindow):
        vals = [c.val for c in d.coeffs.values() if not c.is_zero()]
        return d.is_zero(), (min(vals) if vals else None), d.certified_digits(*(band or (None, None)))
    if isinstance(d, PadicScalar):
        return d.is_zero(), (d.val if not d.is_zero() else None), d.absprec
    if isinstance(d, LocAnFunction):
        vals = [x.val for u in d.cosets for x in u if not x.is_zero()]
        return d.is_zero(), (min(vals) if vals else None), d.certified_digits()
    if isinstance(d, RankOneElement):
        return _cmp(a.with_shift(d.tshift).f, b.with_shift(d.tshift).f)
    raise TypeError(type(d))


# -- random inputs -------------------------------------------------------------
def random_scalar(p: int, rng, prec: int, vmin: int = -3, vmax: int = 3) -> PadicScalar:
    if rng.random() < 0.05:
        return PadicScalar.zero(p, prec + vmax)
    v = rng.randint(vmin, vmax)
    u = rng.randrange(1, p ** prec)
    while u % p == 0:
        u = rng.randrange(1, p ** prec)
    return PadicScalar.from_parts(p, u, v, v + prec)


def random_window(p: int, rng, prec: int, dmin: int, dmax: int, lo: int | None = None,
                  hi: int | None = None) -> LaurentWindow:
    """Integer coefficients on degrees [lo, hi] inside [dmin, dmax]."""
    lo = dmin if lo is None else lo
    hi = dmax if hi is None else hi
    data = {d: rng.randrange(-p ** prec, p ** prec) for d in range(lo, hi + 1)}
    return LaurentWindow.from_dict(p, prec, dmin, dmax, data)


def _w_json(f):
    return f.to_json() if hasattr(f, "to_json") else str(f)


def _units(p: int, rng, count: int, top: int = 200):
    out = []
    while len(out) < count:
        a = rng.randrange(2, top)
        if a % p:
            out.append(a)
    return out


# -- padic ----------------------------------------------------------------------
def case_padic_ring(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("padic.ring_axioms", p=cfg.p, trials=cfg.trials)
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(cfg.trials):
        a, b, c = (random_scalar(p, rng, cfg.N) for _ in range(3))
        ok1, d1_, c1 = _cmp((a + b) + c, a + (b + c))
        ok2, d2_, c2 = _cmp(a * (b + c), a * b + a * c)
        inputs = {"a": a.to_json(), "b": b.to_json(), "c": c.to_json()}
        pr.check(ok1, d1_, c1, inputs, "associativity")
        pr.check(ok2, d2_, c2, inputs, "distributivity")
        if a.val is not None and b.val is not None:
            pr.check((a * b).val == a.val + b.val, inputs=inputs, note="valuation of a product")
    return pr.record()


def case_padic_binom(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("padic.binom_integral", primes=[3, 5], trials=200)
    rng = cfg.rng(pr.name)
    for p in (3, 5):
        for _ in range(200):
            a = PadicScalar.from_int(p, rng.randrange(p ** cfg.N), cfg.N)
            k = rng.randrange(31)
            b = binom(a, k)
            pr.check(b.is_zero() or b.val >= 0, inputs={"p": p, "a": a.to_json(), "k": k},
                     note="binom(a, k) left Z_p")
    return pr.record()


def case_padic_log(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("padic.log_additive", p=cfg.p, trials=cfg.trials)
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(cfg.trials):
        a = PadicScalar.from_int(p, 1 + p * rng.randrange(p ** (cfg.N - 1)), cfg.N)
        b = PadicScalar.from_int(p, 1 + p * rng.randrange(p ** (cfg.N - 1)), cfg.N)
        ok, d, c = _cmp(plog(a * b), plog(a) + plog(b))
        pr.check(ok, d, c, {"a": a.to_json(), "b": b.to_json()}, "log(ab) != log a + log b")
    return pr.record()


# -- cyclo ------------------------------------------------------------------------
def random_cyclo(p: int, n: int, rng, prec: int):
    fld = field(p, n)
    return fld.element([PadicScalar.from_int(p, rng.randrange(-p ** prec, p ** prec), prec)
                        for _ in range(fld.d)])


def case_cyclo_galois(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("cyclo.galois", p=cfg.p, levels=list(range(1, cfg.n_max + 1)))
    rng = cfg.rng(pr.name)
    p = cfg.p
    trials = max(1, cfg.trials // 10)
    for n in range(1, cfg.n_max + 1):
        q = p ** n
        for _ in range(trials):
            a, b = random_cyclo(p, n, rng, cfg.N), random_cyclo(p, n, rng, cfg.N)
            c = rng.randrange(1, q)
            while c % p == 0:
                c = rng.randrange(1, q)
            inputs = {"a": a.to_json(), "b": b.to_json(), "c": c}
            x = field(p, n).scalar(PadicScalar.from_int(p, rng.randrange(p ** cfg.N), cfg.N))
            pr.check(x.galois(c) == x, inputs=inputs, note="Q_p not fixed")
            pr.check((a * b).galois(c) == a.galois(c) * b.galois(c), inputs=inputs, note="not multiplicative")
            pr.check((a + b).galois(c) == a.galois(c) + b.galois(c), inputs=inputs, note="not additive")
            # all conjugates summed land in Q_p
            tot = None
            for e in range(1, q):
                if e % p:
                    g = a.galois(e)
                    tot = g if tot is None else tot + g
            pr.check(all(t.is_zero() for t in tot.coords[1:]), inputs=inputs, note="full trace not rational")
    return pr.record()


def case_cyclo_trace(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("cyclo.trace", p=cfg.p, levels=list(range(1, cfg.n_max + 1)))
    rng = cfg.rng(pr.name)
    p = cfg.p
    trials = max(1, cfg.trials // 10)
    for n in range(1, cfg.n_max + 1):
        for _ in range(trials):
            a = random_cyclo(p, n, rng, cfg.N)
            pr.check(a.embed_up().trace_down() == a.scale(PadicScalar.from_int(p, p, cfg.N + 64)),
                     inputs={"a": a.to_json()}, note="trace_down(embed_up a) != p a")
            if n >= 2:
                c = 1 + p ** (n - 1) * rng.randrange(1, p)
                pr.check(a.galois(c).trace_down() == a.trace_down(), inputs={"a": a.to_json(), "c": c},
                         note="trace not Galois invariant")
    return pr.record()


# -- robba ------------------------------------------------------------------------
def case_psi_phi(cfg: SuiteConfig, primes=None, trials: int | None = None) -> CaseRecord:
    """Criterion 1."""
    primes = primes or [cfg.p]
    trials = trials or cfg.trials
    pr = _Probe("robba.psi_phi_identity", primes=list(primes), trials=trials)
    rng = cfg.rng(pr.name)
    for p in primes:
        for _ in range(trials):
            f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax)
            ok, d, c = _cmp(psi(phi(f)), f, (cfg.dmin, 0))
            pr.check(ok, d, c, {"f": f.to_json()}, "psi(phi f) != f")
    return pr.record()


def _direct_phi_psi(f: LaurentWindow) -> list:
    """(1/p) sum over zeta in mu_p of f(zeta (1+T) - 1), for a polynomial f,
    computed in K_1[T]."""
    p = f.p
    fld = field(p, 1)
    top = max(f.coeffs) if f.coeffs else 0
    acc = [fld.zero() for _ in range(top + 1)]
    for e in range(p):
        z = fld.zeta_power(e, f.prec + 64)
        base = [z - fld.one(f.prec + 64), z]  # zeta - 1 + zeta T
        power = [fld.one(f.prec + 64)]
        for m in range(top + 1):
            if m in f.coeffs:
                for i, c in enumerate(power):
                    acc[i] = acc[i] + c.scale(f.coeffs[m])
            nxt = [fld.zero() for _ in range(len(power) + 1)]
            for i, c in enumerate(power):
                nxt[i] = nxt[i] + c * base[0]
                nxt[i + 1] = nxt[i + 1] + c * base[1]
            power = nxt
    inv_p = PadicScalar.from_fraction(p, Fraction(1, p), f.prec + 64)
    return [a.scale(inv_p) for a in acc]


def case_phi_psi_oracle(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("robba.phi_psi_oracle", p=cfg.p, trials=max(1, cfg.trials // 10))
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(max(1, cfg.trials // 10)):
        f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, 0, min(12, cfg.dmax))
        got = phi(psi(f))
        want = _direct_phi_psi(f)
        ok = all(all(x.is_zero() for x in w.coords[1:]) for w in want)
        pr.check(ok, inputs={"f": f.to_json()}, note="direct oracle left Q_p")
        for d, w in enumerate(want):
            okd, dd, cc = _cmp(got.coeff(d), w.coords[0])
            pr.check(okd, dd, cc, {"f": f.to_json(), "degree": d}, "phi psi disagrees with the K_1 oracle")
    return pr.record()


def case_gamma_commutes(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("robba.gamma_commutes", p=cfg.p, trials=max(1, cfg.trials // 5))
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(max(1, cfg.trials // 5)):
        f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, cfg.dmax // p)
        a = _units(p, rng, 1)[0]
        inputs = {"f": f.to_json(), "a": a}
        band = (cfg.dmin, 0)
        pr.check(*_cmp(gamma(phi(f), a), phi(gamma(f, a)), band), inputs, "gamma phi != phi gamma")
        pr.check(*_cmp(gamma(psi(f), a), psi(gamma(f, a)), band), inputs, "gamma psi != psi gamma")
    return pr.record()


def case_operator_algebra(cfg: SuiteConfig, primes=None, trials: int | None = None) -> CaseRecord:
    """Criterion 3."""
    primes = primes or [cfg.p]
    trials = trials or max(1, cfg.trials // 5)
    pr = _Probe("robba.operator_algebra", primes=list(primes), trials=trials)
    rng = cfg.rng(pr.name)
    for p in primes:
        t = t_series(p, cfg.N, cfg.dmax, cfg.dmin)
        pr.check(*_cmp(phi(t), t.scale(PadicScalar.from_int(p, p, cfg.N + 64))), {"p": p}, "phi(t) != p t")
        for a in _units(p, rng, 3):
            pr.check(*_cmp(gamma(t, a), t.scale(PadicScalar.from_int(p, a, cfg.N + 64))),
                     {"p": p, "a": a}, "gamma_a(t) != a t")
        for _ in range(trials):
            f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -3, cfg.dmax // p)
            a = _units(p, rng, 1)[0]
            inputs = {"p": p, "f": f.to_json(), "a": a}
            pp = PadicScalar.from_int(p, p, cfg.N + 64)
            pr.check(*_cmp(partial(phi(f)), phi(partial(f)).scale(pp)), inputs, "d phi != p phi d")
            pr.check(*_cmp(partial(gamma(f, a)), gamma(partial(f), a).scale(PadicScalar.from_int(p, a, cfg.N + 64))),
                     inputs, "d gamma_a != a gamma_a d")
            g = f.restrict(f.dmin, min(f.dmax, 12))
            for i in (1, 2, 3):
                ti = t_power(p, i, cfg.N, cfg.dmax, cfg.dmin)
                lhs = nabla(series_mul(ti, g), i)
                rhs = series_mul(ti, nabla(g, 0))
                pr.check(*_cmp(lhs, rhs), dict(inputs, i=i), f"nabla_{i}(t^i f) != t^i nabla_0 f")
    return pr.record()


def case_nabla_modes(cfg: SuiteConfig, trials: int = 20) -> CaseRecord:
    """Criterion 4."""
    pr = _Probe("robba.nabla_modes", p=cfg.p, trials=trials)
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(trials):
        f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, 10)
        ok, d, c = _cmp(nabla(f, 0, mode="series"), nabla(f, 0, mode="closed"))
        pr.check(ok, d, c, {"f": f.to_json()}, "series and closed nabla_0 differ")
    return pr.record()


def case_reslog(cfg: SuiteConfig, trials: int = 50) -> CaseRecord:
    """First half of criterion 9."""
    pr = _Probe("robba.reslog_invariance", p=cfg.p, trials=trials)
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(trials):
        f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, cfg.dmax // p)
        a = _units(p, rng, 1)[0]
        inputs = {"f": f.to_json(), "a": a}
        r1 = reslog(psi(f) - f)
        pr.check(r1.is_zero(), r1.val, r1.absprec, inputs, "reslog((psi - 1) f) != 0")
        # gamma_a moves the residue by 1/a; the twisted difference is the image
        r2 = reslog(gamma(f, a).scale(PadicScalar.from_int(p, a, cfg.N + 64)) - f)
        pr.check(r2.is_zero(), r2.val, r2.absprec, inputs, "reslog((a gamma_a - 1) f) != 0")
    pr.note("gamma_a acts on B(1) as a * gamma_a on coefficients")
    return pr.record()


# -- dif ----------------------------------------------------------------------------
def case_diagrams(cfg: SuiteConfig, primes=None, trials: int = 25, levels=(1, 2)) -> CaseRecord:
    """Criterion 2."""
    primes = primes or [cfg.p]
    pr = _Probe("dif.diagrams", primes=list(primes), trials=trials, levels=list(levels))
    rng = cfg.rng(pr.name)
    for p in primes:
        for _ in range(trials):
            f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, cfg.dmax // p)
            for n in levels:
                inputs = {"p": p, "n": n, "f": f.to_json()}
                a = iota(phi(f), n + 1, cfg.L)
                b = iota(f, n, cfg.L).embed_up()
                pr.check(a.agrees(b, cfg.s), a.discrepancy(b), min(x for x in (a.certified_digits(), b.certified_digits()) if x is not None),
                         inputs, "iota phi != embed_up iota")
                c = iota(psi(f), n, cfg.L)
                e = iota(f, n + 1, cfg.L).normalized_trace()
                pr.check(c.agrees(e, cfg.s), c.discrepancy(e), min(x for x in (c.certified_digits(), e.certified_digits()) if x is not None),
                         inputs, "iota psi != (1/p) trace iota")
    return pr.record()


def case_iota_ring(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("dif.iota_ring_and_gamma", p=cfg.p, levels=list(range(1, cfg.n_max + 1)))
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(max(1, cfg.trials // 20)):
        f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, 12)
        g = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, 12)
        a = _units(p, rng, 1)[0]
        for n in range(1, cfg.n_max + 1):
            inputs = {"f": f.to_json(), "g": g.to_json(), "n": n, "a": a}
            lhs, rhs = iota(series_mul(f, g), n, cfg.L), iota(f, n, cfg.L) * iota(g, n, cfg.L)
            pr.check(lhs.agrees(rhs, cfg.s), lhs.discrepancy(rhs), lhs.certified_digits(), inputs,
                     "iota is not multiplicative")
            lhs, rhs = iota(gamma(f, a), n, cfg.L), dif_gamma(iota(f, n, cfg.L), a)
            pr.check(lhs.agrees(rhs, cfg.s), lhs.discrepancy(rhs), lhs.certified_digits(), inputs,
                     "iota is not Gamma-equivariant")
    return pr.record()


# -- bigexp ---------------------------------------------------------------------------
def case_cyclotomic_fixture(cfg: SuiteConfig) -> CaseRecord:
    """Criterion 5."""
    p = cfg.p
    pr = _Probe("bigexp.cyclotomic_fixture", p=p)
    g = cyclotomic_fixture(p, cfg.N, cfg.dmin, cfg.dmax)
    pr.check(*_cmp(psi(g), g), {"f": g.to_json()}, "psi((1+T)/T) != (1+T)/T")
    x = RankOneElement(RankOneCharacter.make(p, 1, 1), 0, g)
    pr.check(nrig_check(x, tuple(range(1, cfg.n_max + 1)), cfg.L), inputs={"x": x.to_json()}, note="fixture not in N_rig")
    pr.check(is_psi_fixed(x), inputs={"x": x.to_json()}, note="fixture not psi-fixed")
    y = nabla_chain(x, 1)
    pr.check(y.tshift == 0, inputs={"x": x.to_json()}, note="nabla chain left D")
    half = PadicScalar.from_fraction(p, Fraction(1, 2), cfg.N + 64)
    pr.check(*_cmp(y.f.coeff(0), half), {"x": x.to_json()}, "constant coefficient is not 1/2")
    return pr.record()


def _fixture_set(cfg: SuiteConfig, rng, count: int, weights=(0, 1, 2)):
    out = []
    for i in range(count):
        k = weights[i % len(weights)]
        ch = RankOneCharacter.make(cfg.p, 1, k)
        out.append(random_psi_fixed(ch, rng, cfg.N, cfg.dmin, cfg.dmax))
    return out


def case_lemma_exp_step(cfg: SuiteConfig, count: int = 10) -> CaseRecord:
    """Criterion 6."""
    pr = _Probe("bigexp.exp_step_and_tilde_square", p=cfg.p, fixtures=count, weights=[0, 1, 2])
    rng = cfg.rng(pr.name)
    for x in _fixture_set(cfg, rng, count):
        k = x.char.k
        h = max(1, k)
        inputs = {"x": x.to_json(), "h": h}
        a = big_exp(x, h + 1).y
        b = mod_nabla(big_exp(x, h).y, h)
        pr.check(*_cmp(a, b), inputs, "Exp_{h+1} != nabla_h Exp_h")
        c = nabla_chain(tilde_partial(x), h).relabel(x.char)
        pr.check(*_cmp(c, a), inputs, "the tilde-partial square does not commute")
    return pr.record()


def case_interpolation(cfg: SuiteConfig, count: int = 5, levels=(1, 2), hs=(1, 2)) -> CaseRecord:
    """Criterion 7."""
    p = cfg.p
    pr = _Probe("bigexp.interpolation_identity", p=p, inputs=1 + count, levels=list(levels), h=list(hs),
                window=[cfg.dmin, cfg.dmax])
    rng = cfg.rng(pr.name)
    ch = RankOneCharacter.make(p, 1, 0)
    xs = [RankOneElement(ch, 0, cyclotomic_fixture(p, cfg.N, cfg.dmin, cfg.dmax))]
    xs += _fixture_set(cfg, rng, count, weights=(0,))
    for x in xs:
        for n in levels:
            for h in hs:
                r = interpolation_identity_check(x, h, n, cfg.L, slack=cfg.s)
                inputs = {"x": x.to_json(), "h": h, "n": n}
                cert = r["certified_digits"]
                disc = r["discrepancy"]
                pr.check(disc is None or cert is None or disc >= cert - cfg.s, disc, cert, inputs,
                         "constant-term identity fails beyond the certified digits")
                pr.check(r["phi_minus_one_t_order_ok"], inputs=inputs, note="(phi - 1) x~ not divisible by t^h")
                if cert is None or cert <= cfg.s:
                    # the inequality is vacuous here; no evidence either way
                    pr.unknown(f"n={n}, h={h}: only {cert} certified digits on [{cfg.dmin}, {cfg.dmax}]", inputs)
    return pr.record()


def case_nabla_containment(cfg: SuiteConfig, trials: int = 50) -> CaseRecord:
    pr = _Probe("bigexp.nabla_chain_in_D", p=cfg.p, trials=trials)
    rng = cfg.rng(pr.name)
    p = cfg.p
    for i in range(trials):
        k = i % 3
        ch = RankOneCharacter.make(p, 1 + p * rng.randrange(p ** 3), k)
        f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, 12)
        x = RankOneElement(ch, k, f)
        for h in (max(1, k), max(1, k) + 1):
            try:
                y = nabla_chain(x, h)
                pr.check(y.tshift == 0, inputs={"x": x.to_json(), "h": h}, note="nabla chain left D")
            except PadicError as exc:
                pr.check(False, inputs={"x": x.to_json(), "h": h}, note=f"nabla chain raised {type(exc).__name__}")
    return pr.record()


def case_m_of_level(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("bigexp.m_bookkeeping", p=cfg.p, levels=[1, 2, 3])
    p = cfg.p
    for n in (1, 2, 3):
        pr.check(m_of_level(p, n) == log_chi_gamma_n(p, n).val == n, inputs={"n": n},
                 note="m(K_n) != v_p(log chi(gamma_n))")
    return pr.record()


# -- herr --------------------------------------------------------------------------------
def case_herr_complex(cfg: SuiteConfig) -> CaseRecord:
    pr = _Probe("herr.complex_identities", p=cfg.p, trials=max(1, cfg.trials // 10))
    rng = cfg.rng(pr.name)
    p = cfg.p
    for _ in range(max(1, cfg.trials // 10)):
        k = rng.randrange(-1, 3)
        ch = RankOneCharacter.make(p, 1 + p * rng.randrange(p ** 3), k)
        x = RankOneElement(ch, 0, random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, cfg.dmax // p))
        y = RankOneElement(ch, 0, random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, cfg.dmax // p))
        inputs = {"x": x.to_json(), "y": y.to_json()}
        pr.check(differential(d1(x)).is_zero(), inputs=inputs, note="d2 d1 != 0")
        pr.check(differential(d1psi(x)).is_zero(), inputs=inputs, note="d2psi d1psi != 0")
        # comparison map on cocycles and coboundaries
        pr.check(differential(to_psi_complex(d1(x))).is_zero(), inputs=inputs,
                 note="comparison map broke a cocycle")
        pr.check((to_psi_complex(d1(x)) - d1psi(x)).is_zero(), inputs=inputs,
                 note="comparison map moved a coboundary")
        z = d1(y)
        pr.check((to_psi_complex(d2(*z.entries)) - d2psi(*to_psi_complex(z).entries)).is_zero(), inputs=inputs,
                 note="comparison map does not commute with the differential")
        # cup11(d1(u), z) = d2(u x', u y') for a cocycle z = [x', y']
        cz = cup11(d1(x), z)
        dz = d2(tensor(x, z.entries[0]), tensor(x, z.entries[1]))
        pr.check((cz - dz).is_zero(), inputs=inputs, note="cup with a coboundary is not a d2-image")
        one = RankOneElement(RankOneCharacter.make(p, 1, 0), 0, LaurentWindow.from_dict(p, cfg.N, cfg.dmin, cfg.dmax, {0: 1}))
        pr.check((cup01(one, z) - z).is_zero(), inputs=inputs, note="cup01 with 1 is not the identity")
    return pr.record()


def _random_dr(ch: RankOneCharacter, rng, prec: int) -> DRFrameVector:
    p = ch.p
    return DRFrameVector(ch, PadicScalar.from_int(p, rng.randrange(1, p ** prec), prec))


def case_exp_class(cfg: SuiteConfig, per_weight: int = 10, weights=(-1, 0, 1, 2)) -> CaseRecord:
    """Criterion 8."""
    p = cfg.p
    pr = _Probe("herr.exp_class", p=p, per_weight=per_weight, weights=list(weights),
                levels=list(range(1, cfg.n_max + 1)))
    rng = cfg.rng(pr.name)
    levels = tuple(range(1, cfg.n_max + 1))
    for k in weights:
        for _ in range(per_weight):
            ch = RankOneCharacter.make(p, 1 + p * rng.randrange(1, p ** 3), k)
            x = _random_dr(ch, rng, cfg.N)
            inputs = {"alpha": ch.alpha.to_json(), "k": k, "c": x.c.to_json()}
            try:
                xt = lift_solver(x, levels, cfg.L, dmin=cfg.dmin, dmax=cfg.dmax, prec=cfg.N)
                if k > 0:
                    xt2 = lift_solver(x, levels, cfg.L, shift=-5, dmin=cfg.dmin, dmax=cfg.dmax, prec=cfg.N)
                else:
                    # x is regular: c t^(-k) e is itself a lift
                    F = series_mul(t_power(p, -k, cfg.N, cfg.dmax, cfg.dmin),
                                   LaurentWindow.from_dict(p, cfg.N, cfg.dmin, cfg.dmax, {0: x.c})) if k < 0 else \
                        LaurentWindow.from_dict(p, cfg.N, cfg.dmin, cfg.dmax, {0: x.c})
                    xt2 = RankOneElement(ch, 0, F)
            except NoSolutionInWindow as exc:
                pr.unknown(f"lift solver: {exc}", inputs)
                continue
            z = exp_class(x, xt)
            pr.check(differential(z).is_zero(), inputs=inputs, note="exp_class is not a cocycle")
            pr.check(differential(d1(xt)).is_zero(), inputs=inputs, note="d2 d1 != 0 on the lift")
            try:
                lift_independence(x, xt, xt2, levels, cfg.dmin, cfg.dmax, cfg.s)
            except NoSolutionInWindow as exc:
                pr.unknown(f"coboundary solve: {exc}", inputs)
            if k <= 0:
                # Fil^0 input: the class itself is a coboundary
                try:
                    solve_preimage(z, ch, tshift=z.entries[0].tshift, degrees=range(cfg.dmin, cfg.dmax + 1),
                                   dmin=cfg.dmin, dmax=cfg.dmax, slack=cfg.s, levels=levels)
                except NoSolutionInWindow as exc:
                    pr.unknown(f"Fil^0 class: {exc}", inputs)
    pr.note("coboundaries are searched with no polar part at the lift levels only")
    return pr.record()


def case_h2(cfg: SuiteConfig, trials: int = 10) -> CaseRecord:
    """Second half of criterion 9."""
    p = cfg.p
    pr = _Probe("herr.h2_functional", p=p, trials=trials)
    rng = cfg.rng(pr.name)
    ch = RankOneCharacter.make(p, 1, 1)
    fix = RankOneElement(ch, 0, LaurentWindow.from_dict(p, cfg.N, cfg.dmin, cfg.dmax, {-1: 1}))
    one = PadicScalar.from_int(p, 1, cfg.N + 64)
    pr.check(*_cmp(h2_functional(fix), one), {"f": fix.to_json()}, "h2(T^-1) != 1")
    for _ in range(trials):
        g = RankOneElement(ch, 0, random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, -2, cfg.dmax // p))
        inputs = {"g": g.to_json()}
        for name, img in (("psi", mod_psi(g) - g),
                          ("gamma", mod_gamma(g, gamma_K(p)) - g)):
            v = h2_functional(img)
            pr.check(v.is_zero(), v.val, v.absprec, inputs, f"h2 of a ({name} - 1)-image is not 0")
        v = h2_functional(fix + (mod_psi(g) - g))
        pr.check(*_cmp(v, one), inputs, "h2 does not separate T^-1 from coboundaries")
    return pr.record()


def _dual_cocycle(x: DRFrameVector, rng, prec: int, dmin: int, dmax: int):
    """z = a [log chi t^(k-1) e', 0] + b [0, e'] (b only for k = 1) + d1(w),
    a cocycle for the dual twisted character."""
    ch = x.char
    p, k = ch.p, ch.k
    dch = ch.dual()
    a = PadicScalar.from_int(p, rng.randrange(1, p ** 6), prec)
    j = 1 - k
    xe = RankOneElement(dch, j, LaurentWindow.from_dict(p, prec, dmin, dmax, {0: a * log_chi_gamma_K(p)}))
    ze = RankOneElement(dch, j, LaurentWindow.zero(p, prec, dmin, dmax))
    z = Cochain(PHI, 1, [xe, ze])
    if k == 1:
        b = PadicScalar.from_int(p, rng.randrange(0, p ** 6), prec)
        z = z + Cochain(PHI, 1, [ze, RankOneElement(dch, 0, LaurentWindow.from_dict(p, prec, dmin, dmax, {0: b}))])
    w = RankOneElement(dch, j, LaurentWindow.from_dict(p, prec, dmin, dmax,
                                                       {d: rng.randrange(-20, 20) for d in range(0, 5)}))
    return z + d1(w)


def case_adjointness(cfg: SuiteConfig, pairs: int = 20, weights=(1, 2)) -> CaseRecord:
    """Criterion 11: the ratio of the two pairings is one constant."""
    p = cfg.p
    pr = _Probe("herr.adjointness_constant", p=p, pairs=pairs, weights=list(weights))
    rng = cfg.rng(pr.name)
    ratios = []
    for i in range(pairs):
        k = weights[i % len(weights)]
        alpha = PadicScalar.from_fraction(p, Fraction(p) ** (k - 1), cfg.N + 64)
        ch = RankOneCharacter.make(p, alpha, k)
        x = DRFrameVector(ch, PadicScalar.from_int(p, rng.randrange(1, p ** 6), cfg.N))
        z = _dual_cocycle(x, rng, cfg.N, cfg.dmin, cfg.dmax)
        inputs = {"k": k, "c": x.c.to_json(), "z": z.to_json()}
        pr.check(differential(z).is_zero(), inputs=inputs, note="dual input is not a cocycle")
        try:
            lhs, rhs = adjoint_pair(x, z)
        except NoSolutionInWindow as exc:
            pr.unknown(f"lift solver: {exc}", inputs)
            continue
        pr.check(dual_exp(z).in_fil0, inputs=inputs, note="dual_exp left Fil^0")
        if rhs.is_zero():
            pr.unknown("de Rham pairing vanished at precision", inputs)
            continue
        ratios.append((lhs / rhs, inputs))
    if ratios:
        ref = ratios[0][0]
        for r, inputs in ratios[1:]:
            ok, d, c = _cmp(r, ref)
            pr.check(ok, d, c, inputs, "the fitted constant moved")
        pr.note(f"fitted constant {ref}")
    return pr.record()


def case_dual_exp(cfg: SuiteConfig, trials: int = 10) -> CaseRecord:
    p = cfg.p
    pr = _Probe("herr.dual_exp_and_pairing", p=p, trials=trials)
    rng = cfg.rng(pr.name)
    for _ in range(trials):
        k = rng.randrange(-1, 3)
        ch = RankOneCharacter.make(p, 1 + p * rng.randrange(p ** 3), k)
        x = _random_dr(ch, rng, cfg.N)
        inputs = {"k": k, "c": x.c.to_json()}
        # g_class(x), carried to a phi-complex cochain by the constant lift;
        # the level-1 frame change multiplies by p^k / alpha
        g = g_class(x, 1, cfg.L).coeff(0).coords[0] * ch.alpha / PadicScalar.from_fraction(p, Fraction(p) ** k, cfg.N + 64)
        zero = LaurentWindow.zero(p, cfg.N, cfg.dmin, cfg.dmax)
        z = Cochain(PHI, 1, [RankOneElement(ch, k, LaurentWindow.from_dict(p, cfg.N, cfg.dmin, cfg.dmax, {0: g})),
                             RankOneElement(ch, k, zero)])
        pr.check(*_cmp(dual_exp(z, 1, cfg.L).c, x.c), inputs, "dual_exp(g_class(x)) != x")
        zz = Cochain(PHI, 1, [RankOneElement(ch, k, zero), RankOneElement(ch, k, zero)])
        pr.check(dual_exp(zz, 1, cfg.L).c.is_zero(), inputs=inputs, note="dual_exp(0) != 0")
        one = DRFrameVector(ch, PadicScalar.from_int(p, 1, cfg.N))
        y1 = DRFrameVector(ch.dual(), PadicScalar.from_int(p, 1, cfg.N))
        pr.check(*_cmp(pair_dR(one, y1), PadicScalar.from_int(p, 1, cfg.N)), inputs, "dual bases do not pair to 1")
        a, b = _random_dr(ch, rng, cfg.N), _random_dr(ch, rng, cfg.N)
        y = _random_dr(ch.dual(), rng, cfg.N)
        lam = PadicScalar.from_int(p, rng.randrange(1, p ** 6), cfg.N)
        lhs = pair_dR(DRFrameVector(ch, a.c + b.c * lam), y)
        rhs = pair_dR(a, y) + pair_dR(b, y) * lam
        pr.check(*_cmp(lhs, rhs), inputs, "pair_dR is not bilinear")
        # Fil^0 x Fil^0: weights k and 1 - k cannot both be <= 0, so the pair
        # can only meet there through a zero vector
        for cx in (x.c, PadicScalar.zero(p)):
            for cy in (y.c, PadicScalar.zero(p)):
                u, v = DRFrameVector(ch, cx), DRFrameVector(ch.dual(), cy)
                if u.in_fil0 and v.in_fil0:
                    pr.check(pair_dR(u, v).is_zero(), inputs=inputs, note="pair_dR nonzero on Fil^0 x Fil^0")
    return pr.record()


# -- fourier -------------------------------------------------------------------------------
def case_fourier(cfg: SuiteConfig, primes=None, trials: int | None = None, h: int = 2, Lf: int = 6) -> CaseRecord:
    """Criterion 10."""
    primes = primes or [cfg.p]
    trials = trials or max(1, cfg.trials // 10)
    pr = _Probe("fourier.colmez", primes=list(primes), trials=trials, h=h, taylorprec=Lf)
    rng = cfg.rng(pr.name)
    for p in primes:
        for k in range(11):
            m = monomial(p, k, h, Lf, cfg.N)
            pr.check(*_cmp(la_psi(m), monomial(p, k, h - 1, Lf, cfg.N).scale(p ** k)),
                     {"p": p, "k": k}, "psi(x^k) != p^k x^k")
            for a in _units(p, rng, 2, 50):
                c = PadicScalar.from_fraction(p, Fraction(1, a ** (k + 1)), cfg.N + 64)
                pr.check(*_cmp(la_gamma(m, a), m.scale(c)), {"p": p, "k": k, "a": a},
                         "gamma_a(x^k) != a^-(k+1) x^k")
        for _ in range(trials):
            pos = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, 0, cfg.dmax)
            pr.check(colmez(pos, h, Lf).is_zero(), inputs={"p": p, "f": pos.to_json()},
                     note="Col does not kill the non-negative part")
            f = random_window(p, rng, cfg.N, cfg.dmin, cfg.dmax, cfg.dmin, -1)
            F = colmez(f, h, Lf)
            inputs = {"p": p, "f": f.to_json()}
            pr.check(not F.is_zero(), inputs=inputs, note="Col killed a non-zero negative part")
            pr.check(*_cmp(la_psi(la_phi(F)), F), inputs, "psi phi != id on LA")
            pr.check(*_cmp(colmez(phi(f), h + 1, Lf), la_phi(F)), inputs, "Col phi != phi Col")
            pr.check(*_cmp(colmez(psi(f), h - 1, Lf), la_psi(F)), inputs, "Col psi != psi Col")
            a = _units(p, rng, 1, 50)[0]
            pr.check(*_cmp(colmez(gamma(f, a), h, Lf), la_gamma(F, a)), dict(inputs, a=a), "Col gamma != gamma Col")
            poly = [rng.randrange(-9, 10) for _ in range(4)]
            back = colmez(col_preimage(poly, p, cfg.N, cfg.dmin, cfg.dmax), h, Lf)
            pr.check(*_cmp(back, LocAnFunction.from_polynomial(p, poly, h, Lf, cfg.N)),
                     {"p": p, "poly": poly}, "col_preimage is not a section")
    return pr.record()


# -- batteries -------------------------------------------------------------------------------
BATTERIES = {
    "padic": [case_padic_ring, case_padic_binom, case_padic_log],
    "cyclo": [case_cyclo_galois, case_cyclo_trace],
    "robba": [case_psi_phi, case_phi_psi_oracle, case_gamma_commutes, case_operator_algebra,
              case_nabla_modes, case_reslog],
    "dif": [case_diagrams, case_iota_ring],
    "bigexp": [case_cyclotomic_fixture, case_lemma_exp_step, case_interpolation,
               case_nabla_containment, case_m_of_level],
    "herr": [case_herr_complex, case_exp_class, case_h2, case_adjointness, case_dual_exp],
    "fourier": [case_fourier],
}


def run_case(fn, cfg: SuiteConfig) -> CaseRecord:
    """Run one case; a kernel error inside a case is a failure, not a crash."""
    name = fn.__name__.removeprefix("case_")
    try:
        return fn(cfg)
    except NoSolutionInWindow as exc:
        return CaseRecord(name, {}, INCONCLUSIVE, ledger=[f"solver: {exc}"])
    except PadicError as exc:
        return CaseRecord(name, {}, FAIL, ledger=[f"{type(exc).__name__}: {exc}"])


def run_suite(name: str, cfg: SuiteConfig | None = None) -> VerificationReport:
    cfg = cfg or SuiteConfig()
    names = SUITES if name == "all" else (name,)
    cases = []
    for n in names:
        if n not in BATTERIES:
            raise ValueError(f"unknown suite {n!r}")
        cases.extend(run_case(fn, cfg) for fn in BATTERIES[n])
    return VerificationReport(name, cases, cfg)


# -- acceptance criteria -------------------------------------------------------------------------
def criterion(n: int, cfg: SuiteConfig | None = None) -> CaseRecord:
    """The numbered acceptance criterion at its stated sizes."""
    cfg = cfg or SuiteConfig()
    both = [3, 5]
    table = {
        1: lambda: case_psi_phi(cfg, both, 100),
        2: lambda: case_diagrams(cfg, both, 25, (1, 2)),
        3: lambda: case_operator_algebra(cfg, both, 20),
        4: lambda: case_nabla_modes(cfg, 20),
        5: lambda: case_cyclotomic_fixture(cfg),
        6: lambda: case_lemma_exp_step(cfg, 10),
        7: lambda: _criterion_7(cfg),
        8: lambda: case_exp_class(cfg, 10, (-1, 0, 1, 2)),
        9: lambda: _merge("criterion_9", [case_reslog(cfg, 50), case_h2(cfg, 10)]),
        10: lambda: case_fourier(cfg, both, 10),
        11: lambda: case_adjointness(cfg, 20),
    }
    if n not in table:
        raise ValueError("criteria are numbered 1..11")
    return table[n]()


def _criterion_7(cfg: SuiteConfig) -> CaseRecord:
    """The stated window leaves too few digits at n = 2, so the identity is
    rerun on a window reaching degree 120.  The stated-window run must not
    fail; the wide run must pass outright."""
    base = case_interpolation(cfg, 5, (1, 2), (1, 2))
    wide_cfg = SuiteConfig(**{**asdict(cfg), "dmax": max(cfg.dmax, 120)})
    wide = case_interpolation(wide_cfg, 5, (1, 2), (1, 2))
    rec = _merge("criterion_7", [base, wide])
    rec.certified_digits = wide.certified_digits
    if base.status == INCONCLUSIVE and wide.status == PASS:
        rec.status = PASS
        rec.ledger.append(f"stated window inconclusive at n=2; window [{wide_cfg.dmin}, {wide_cfg.dmax}] "
                          f"certifies {wide.certified_digits} digits")
    return rec


def _merge(name: str, recs: list) -> CaseRecord:
    status = FAIL if any(r.status == FAIL for r in recs) else (
        INCONCLUSIVE if any(r.status == INCONCLUSIVE for r in recs) else PASS)
    ds = [r.discrepancy for r in recs if isinstance(r.discrepancy, int)]
    cs = [r.certified_digits for r in recs if isinstance(r.certified_digits, int)]
    return CaseRecord(name, {"parts": [r.name for r in recs]}, status, min(ds) if ds else None,
                      min(cs) if cs else None, [x for r in recs for x in r.ledger],
                      [x for r in recs for x in r.inputs])
