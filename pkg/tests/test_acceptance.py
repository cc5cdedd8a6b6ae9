"""Acceptance criteria 1 to 11 at their stated sizes.  Each prints one
PASS/FAIL line; inconclusive counts as not passing."""
import time

import pytest

from phigamma.suites import PASS, SuiteConfig, criterion

TITLES = {
    1: "psi phi = id, 100 series, p in {3, 5}",
    2: "iota diagrams, 25 series per prime, levels (1, 2), slack 2",
    3: "operator algebra",
    4: "nabla_0 series mode vs closed mode, 20 inputs",
    5: "cyclotomic-unit fixture",
    6: "Exp_{h+1} = nabla_h Exp_h and the tilde-partial square, 10 fixtures",
    7: "weight-0 constant-term identity, h and n in {1, 2}",
    8: "Herr complex, exp_class cocycles and lift independence",
    9: "residue functional",
    10: "Colmez transform",
    11: "adjointness constant, 20 pairs",
}


@pytest.mark.parametrize("n", range(1, 12))
def test_criterion(n):
    t0 = time.time()
    rec = criterion(n, SuiteConfig())
    line = (f"criterion {n:2d}: {'PASS' if rec.status == PASS else 'FAIL'} [{rec.status}] "
            f"{TITLES[n]} (certified digits {rec.certified_digits}, {time.time() - t0:.1f}s)")
    print("\n" + line)
    for note in rec.ledger:
        print(f"    note: {note}")
    assert rec.status == PASS, (line, rec.ledger, rec.inputs[:1])
