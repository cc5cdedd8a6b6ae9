"""Linear solves over Q_p by fixed-point elimination.

Entries are scaled to a common integral lattice and reduced mod p^M; pivots
are chosen with minimal valuation (ties broken by row, then column), so the
output is deterministic.  Solutions are returned as candidates: callers are
expected to recheck the residual with tracked precision.
"""
from __future__ import annotations

from fractions import Fraction

from .padic import PadicError, PadicScalar, ppow


class NoSolution(PadicError):
    pass


def _v(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _balance(rows, rhs, p):
    # scale each equation so all right-hand sides share one absolute
    # precision; otherwise the elimination dumps loose digits into tight rows
    absps = [b.absprec for b in rhs if b.absprec is not None]
    if not absps:
        return rows, rhs
    top = max(absps)
    out_r, out_b = [], []
    for r, b in zip(rows, rhs):
        sh = 0 if b.absprec is None else top - b.absprec
        if sh:
            f = PadicScalar.from_parts(p, 1, sh, sh + 10 ** 6)
            r = [c * f for c in r]
            b = b * f
        out_r.append(r)
        out_b.append(b)
    return out_r, out_b


def _eliminate(rows, rhs, p, e, M, ncol):
    mod = ppow(p, M)

    def scaled(c: PadicScalar) -> int:
        if c.val is None:
            return 0
        return c.unit * ppow(p, c.val - e) % mod

    A = [[scaled(c) for c in r] + [scaled(b)] for r, b in zip(rows, rhs)]
    nrow = len(A)
    pivots: list[tuple[int, int, int]] = []  # (row, col, valuation)
    free_cols = set(range(ncol))
    live = list(range(nrow))
    lost = 0
    while free_cols and live:
        best = None
        for i in live:
            row = A[i]
            for j in sorted(free_cols):
                if row[j]:
                    v = _v(row[j], p, M)
                    if v < M and (best is None or v < best[0]):
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, pi, pj = best
        prow = A[pi]
        unit = prow[pj] // ppow(p, v)
        inv = pow(unit, -1, mod)
        live.remove(pi)
        for i in live:
            a = A[i][pj]
            if a:
                f = (a // ppow(p, v)) * inv % mod
                r = A[i]
                for j in range(ncol + 1):
                    if prow[j]:
                        r[j] = (r[j] - f * prow[j]) % mod
        free_cols.discard(pj)
        pivots.append((pi, pj, v))
        lost += v
    return A, pivots, live, lost


def solve(rows: list[list[PadicScalar]], rhs: list[PadicScalar], p: int,
          prec: int, guard: int = 8, certify: bool = False) -> list[PadicScalar]:
    """One solution x of rows * x = rhs, free unknowns set to zero.

    Raises NoSolution when a reduced equation keeps a right-hand side whose
    valuation is below the digits the inputs can certify.  With certify=True
    the output is capped at the absolute precision the inputs support.
    """
    if not rows:
        return []
    ncol = len(rows[0])
    rows, rhs = _balance(rows, rhs, p)
    entries = [c for r in rows for c in r] + list(rhs)
    vals = [c.val for c in entries if c.val is not None]
    if not vals:
        return [PadicScalar.zero(p) for _ in range(ncol)]
    e = min(vals)
    absps = [c.absprec for c in entries if c.absprec is not None]
    floor = (min(absps) if absps else e + prec) - e
    M = max(floor, prec, 1) + guard
    while True:
        A, pivots, live, lost = _eliminate(rows, rhs, p, e, M, ncol)
        # pivot divisions eat `lost` digits of the modulus
        if M >= max(floor, prec, 1) + lost + guard:
            break
        M = max(floor, prec, 1) + lost + guard
    threshold = floor - lost
    for i in live:
        b = A[i][ncol]
        if b and _v(b, p, M) < threshold:
            raise NoSolution(f"inconsistent equation (residual valuation {_v(b, p, M)} < {threshold})")
    # back substitution on x * p^lost, integral by construction
    big = ppow(p, M + lost)
    X = [0] * ncol
    for pi, pj, v in reversed(pivots):
        row = A[pi]
        s = row[ncol] * ppow(p, lost)
        for j in range(ncol):
            if j != pj and row[j] and X[j]:
                s -= row[j] * X[j]
        s %= big
        unit = row[pj] // ppow(p, v)
        X[pj] = (s // ppow(p, v)) * pow(unit, -1, big) % big
    # the scale p^e cancels between matrix and right-hand side.  The output
    # is a chosen candidate, not a certified solution: ill-conditioned
    # systems leave x loose while the residual is tight, so callers check
    # the residual against the precision of the right-hand side
    out = []
    for xi in X:
        if xi > big // 2:
            xi -= big
        out.append(PadicScalar.from_fraction(p, Fraction(xi, ppow(p, lost)), prec))
    if certify:
        cap = _certified_abs(rows, rhs, out, e, max((v for _, _, v in pivots), default=0))
        if cap is not None:
            out = [x.cap(cap) for x in out]
    return out


def _certified_abs(rows, rhs, x, e, maxpiv):
    # full pivoting on minimal valuation yields the elementary divisors, so
    # v(A^-1) >= -e - maxpiv and dx = A^-1 (db - dA x)
    def least(cs):
        ps = [c.absprec for c in cs if c.absprec is not None]
        return min(ps) if ps else None

    b_abs = least(rhs)
    a_abs = least([c for r in rows for c in r])
    vx = [c.val for c in x if c.val is not None]
    if a_abs is not None:
        a_abs += min(vx) if vx else 0
    known = [a for a in (b_abs, a_abs) if a is not None]
    if not known:
        return None
    return min(known) - e - maxpiv
