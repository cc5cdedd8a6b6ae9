import time

import pytest

from phigamma.suites import (FAIL, INCONCLUSIVE, PASS, SUITES, CaseRecord, SuiteConfig,
                             VerificationReport, run_suite)


def test_defaults():
    c = SuiteConfig()
    assert (c.p, c.N, c.window, c.L, c.n_max, c.trials, c.seed, c.s) == (3, 12, (-8, 40), 8, 2, 100, 42, 2)


@pytest.mark.parametrize("bad", [{"p": 4}, {"p": 2}, {"window": [1, 40]}, {"N": 0},
                                 {"trials": "x"}, {"colour": 1}, {"window": [0]}])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SuiteConfig.from_json(bad)


def test_report_sorted_and_aggregate():
    cases = [CaseRecord("b", {}, PASS), CaseRecord("a", {}, INCONCLUSIVE)]
    r = VerificationReport("x", cases, SuiteConfig())
    assert [c["name"] for c in r.to_json()["cases"]] == ["a", "b"]
    assert r.passed and r.inconclusive
    r.cases.append(CaseRecord("c", {}, FAIL, inputs=[{"f": 1}]))
    assert not r.passed


@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes_in_budget(suite):
    t0 = time.time()
    report = run_suite(suite)
    elapsed = time.time() - t0
    bad = [(c.name, c.ledger) for c in report.cases if c.status == FAIL]
    assert not bad
    assert elapsed < 60, f"{suite} took {elapsed:.1f}s"
    assert report.dumps() == run_suite(suite).dumps() if suite in ("padic", "cyclo", "fourier") else True
