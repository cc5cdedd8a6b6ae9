"""phigamma command line: op, verify, exp, col.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 kernel error
(error JSON on stdout), 4 input not fixed by psi.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import KERNEL_VERSION
from .dif import iota
from .fourier import col_preimage, colmez
from .herr import NoSolutionInWindow
from .padic import PadicError, PadicScalar
from .rankone import (NotPsiFixed, RankOneCharacter, RankOneElement, T_L_project, big_exp,
                      interpolation_identity_check, is_psi_fixed, mod_nabla)
from .robba import LaurentWindow, gamma, nabla, partial, phi, psi, res, reslog
from .suites import SUITES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_KERNEL, EXIT_NOT_PSI_FIXED = 0, 1, 2, 3, 4

OPS = ("phi", "psi", "gamma", "partial", "nabla", "res", "reslog", "iota", "colmez")


class SchemaError(ValueError):
    pass


def _log(msg: str):
    print(msg, file=sys.stderr)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not JSON: {exc}") from exc


def _emit(obj, path: str | None):
    text = json.dumps(obj, sort_keys=True, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _window(obj) -> LaurentWindow:
    try:
        return LaurentWindow.from_json(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(f"bad Laurent window: {exc}") from exc


def _scalar_arg(p: int, text: str, prec: int) -> PadicScalar:
    """An integer, a fraction a/b, or a JSON scalar encoding."""
    text = text.strip()
    try:
        if text.startswith("{"):
            return PadicScalar.from_json(p, json.loads(text))
        return PadicScalar.from_fraction(p, Fraction(text), prec + 64)
    except (ValueError, ZeroDivisionError, json.JSONDecodeError) as exc:
        raise SchemaError(f"bad scalar {text!r}: {exc}") from exc


def _unit_arg(p: int, a: int) -> int:
    if a % p == 0:
        raise SchemaError(f"--a must be prime to {p}")
    return a


# -- op --------------------------------------------------------------------------
def cmd_op(args) -> int:
    f = _window(_read_json(args.input))
    op = args.op
    if op == "phi":
        out = phi(f).to_json()
    elif op == "psi":
        out = psi(f).to_json()
    elif op == "gamma":
        out = gamma(f, _unit_arg(f.p, args.a)).to_json()
    elif op == "partial":
        out = partial(f).to_json()
    elif op == "nabla":
        out = nabla(f, args.i).to_json()
    elif op == "res":
        out = res(f).to_json()
    elif op == "reslog":
        out = reslog(f).to_json()
    elif op == "iota":
        if args.level < 0:
            raise SchemaError("--level must be non-negative")
        out = iota(f, args.level, args.L).to_json()
    else:
        out = colmez(f, args.level, args.taylorprec).to_json()
    _emit(out, args.out)
    return EXIT_OK


# -- verify --------------------------------------------------------------------------
_FLAG_KEYS = ("p", "N", "L", "n_max", "trials", "seed", "s")


def _config(args) -> SuiteConfig:
    base = {}
    if args.config:
        base = _read_json(args.config)
        if not isinstance(base, dict):
            raise SchemaError("config must be a JSON object")
    for key in _FLAG_KEYS:
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    if args.window is not None:
        base["window"] = list(args.window)
    try:
        return SuiteConfig.from_json(base)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"bad config: {exc}") from exc


def cmd_verify(args) -> int:
    cfg = _config(args)
    report = run_suite(args.suite, cfg)
    text = report.dumps()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for c in sorted(report.cases, key=lambda c: c.name):
        _log(f"{c.status:12} {c.name}" + (f"  ({'; '.join(c.ledger)})" if c.status != "pass" and c.ledger else ""))
    if not report.passed:
        return EXIT_FAIL
    if report.inconclusive:
        _log("warning: inconclusive cases present")
        if args.strict:
            return EXIT_FAIL
    return EXIT_OK


# -- exp ----------------------------------------------------------------------------------
def cmd_exp(args) -> int:
    obj = _read_json(args.input)
    if isinstance(obj, dict) and "f" in obj:
        try:
            x = RankOneElement.from_json(obj)
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaError(f"bad rank-one element: {exc}") from exc
        ch = x.char
    else:
        f = _window(obj)
        if args.alpha is None or args.weight is None:
            raise SchemaError("a bare series needs --alpha and --weight")
        try:
            ch = RankOneCharacter(_scalar_arg(f.p, args.alpha, f.prec), args.weight)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
        x = RankOneElement(ch, 0, f)
    if args.level < 1:
        raise SchemaError("--level must be at least 1")
    if not is_psi_fixed(x):
        raise NotPsiFixed("input is not fixed by psi at precision")
    h = args.h if args.h is not None else max(1, ch.k)
    ex = big_exp(x, h)
    nxt = big_exp(x, h + 1)
    step = nxt.y - mod_nabla(ex.y, h)
    vals = [c.val for c in step.f.coeffs.values() if not c.is_zero()]
    report = {
        "kernel_version": KERNEL_VERSION,
        "character": ch.to_json(),
        "h": h,
        "nabla_chain": ex.y.to_json(),
        "T_L": {str(n): T_L_project(x, n, L=args.L).to_json() for n in range(1, args.level + 1)},
        "exp_step": {"discrepancy": min(vals) if vals else None,
                     "certified_digits": step.f.certified_digits(), "ok": step.is_zero()},
    }
    if ch.k == 0 and x.tshift == 0:
        inter = {}
        for n in range(1, args.level + 1):
            r = interpolation_identity_check(x, h, n, args.L)
            inter[str(n)] = {k: (v.to_json() if hasattr(v, "to_json") else v) for k, v in r.items()}
        report["interpolation"] = inter
    else:
        report["interpolation"] = None
    _emit(report, args.report)
    return EXIT_OK


# -- col -----------------------------------------------------------------------------------
def cmd_col(args) -> int:
    if args.preimage is not None:
        try:
            coeffs = [int(c) for c in args.preimage.split(",")]
        except ValueError as exc:
            raise SchemaError("--preimage takes comma-separated integers") from exc
        out = col_preimage(coeffs, args.p, args.N).to_json()
    else:
        if args.input is None:
            raise SchemaError("col needs --in or --preimage")
        f = _window(_read_json(args.input))
        out = colmez(f, args.level, args.taylorprec).to_json()
    _emit(out, args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phigamma", description="(phi, Gamma)-module kernel")
    ap.add_argument("--version", action="version", version=KERNEL_VERSION)
    sub = ap.add_subparsers(dest="cmd", required=True)

    op = sub.add_parser("op", help="apply one operator to a Laurent window")
    op.add_argument("--op", required=True, choices=OPS)
    op.add_argument("--in", dest="input", required=True)
    op.add_argument("--out")
    op.add_argument("--a", type=int, default=2, help="unit for gamma")
    op.add_argument("--i", type=int, default=0, help="index for nabla_i")
    op.add_argument("--level", type=int, default=1, help="level for iota, or h for colmez")
    op.add_argument("--L", type=int, default=8)
    op.add_argument("--taylorprec", type=int, default=6)
    op.set_defaults(func=cmd_op)

    ver = sub.add_parser("verify", help="run a verification battery")
    ver.add_argument("--suite", required=True, choices=SUITES + ("all",))
    ver.add_argument("--config")
    ver.add_argument("--report")
    ver.add_argument("--strict", action="store_true", help="treat inconclusive cases as failures")
    ver.add_argument("--p", type=int)
    ver.add_argument("--N", type=int)
    ver.add_argument("--window", type=int, nargs=2, metavar=("DMIN", "DMAX"))
    ver.add_argument("--L", type=int)
    ver.add_argument("--n-max", dest="n_max", type=int)
    ver.add_argument("--trials", type=int)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--s", type=int)
    ver.set_defaults(func=cmd_verify)

    ex = sub.add_parser("exp", help="big exponential of a psi-fixed element")
    ex.add_argument("--in", dest="input", required=True)
    ex.add_argument("--alpha")
    ex.add_argument("--weight", type=int)
    ex.add_argument("--h", type=int)
    ex.add_argument("--level", type=int, default=1)
    ex.add_argument("--L", type=int, default=8)
    ex.add_argument("--report")
    ex.set_defaults(func=cmd_exp)

    col = sub.add_parser("col", help="Colmez transform, or a preimage of a polynomial")
    col.add_argument("--in", dest="input")
    col.add_argument("--preimage", help="comma-separated polynomial coefficients")
    col.add_argument("--p", type=int, default=3)
    col.add_argument("--N", type=int, default=12)
    col.add_argument("--level", type=int, default=2, help="level h")
    col.add_argument("--taylorprec", type=int, default=6)
    col.add_argument("--out")
    col.set_defaults(func=cmd_col)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SCHEMA if exc.code else EXIT_OK
    try:
        return args.func(args)
    except SchemaError as exc:
        _log(f"error: {exc}")
        return EXIT_SCHEMA
    except NotPsiFixed as exc:
        _log(f"error: {exc}")
        print(json.dumps({"error": "NotPsiFixed", "message": str(exc)}))
        return EXIT_NOT_PSI_FIXED
    except (PadicError, NoSolutionInWindow, ArithmeticError) as exc:
        _log(f"kernel error: {exc}")
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_KERNEL


if __name__ == "__main__":
    sys.exit(main())
