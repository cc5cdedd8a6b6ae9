import json

import pytest

from phigamma.cli import main
from phigamma.padic import PadicScalar
from phigamma.rankone import cyclotomic_fixture
from phigamma.robba import LaurentWindow


def dump(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "T": dump(tmp_path, "T.json", LaurentWindow.from_dict(3, 12, -8, 40, {1: 1}).to_json()),
        "invT": dump(tmp_path, "invT.json", LaurentWindow.from_dict(3, 12, -8, 40, {-1: 1}).to_json()),
        "cu": dump(tmp_path, "cu.json", cyclotomic_fixture(3).to_json()),
        "bad": dump(tmp_path, "bad.json", {"p": 3}),
    }


def read(path):
    with open(path) as fh:
        return json.load(fh)


def test_op_phi(files, tmp_path):
    out = str(tmp_path / "o.json")
    assert main(["op", "--op", "phi", "--in", files["T"], "--out", out]) == 0
    got = LaurentWindow.from_json(read(out))
    assert (got - LaurentWindow.from_dict(3, 12, -8, 40, {1: 3, 2: 3, 3: 1})).is_zero()


def test_op_res(files, capsys):
    assert main(["op", "--op", "res", "--in", files["invT"]]) == 0
    assert PadicScalar.from_json(3, json.loads(capsys.readouterr().out)) == PadicScalar.from_int(3, 1)


def test_op_psi_fixture(files, tmp_path):
    out = str(tmp_path / "o.json")
    assert main(["op", "--op", "psi", "--in", files["cu"], "--out", out]) == 0
    assert (LaurentWindow.from_json(read(out)) - cyclotomic_fixture(3)).is_zero()


@pytest.mark.parametrize("op", ["gamma", "partial", "nabla", "reslog", "iota", "colmez"])
def test_op_other(files, op, tmp_path):
    assert main(["op", "--op", op, "--in", files["cu"], "--out", str(tmp_path / "o.json")]) == 0


def test_schema_violation(files):
    assert main(["op", "--op", "phi", "--in", files["bad"]]) == 2
    assert main(["op", "--op", "gamma", "--a", "3", "--in", files["T"]]) == 2
    assert main(["op", "--op", "nope", "--in", files["T"]]) == 2
    assert main(["verify", "--suite", "padic", "--p", "4"]) == 2


def test_zero_alpha_is_a_schema_violation(tmp_path):
    path = dump(tmp_path, "z.json", LaurentWindow.from_dict(3, 12, -8, 40, {}).to_json())
    assert main(["exp", "--in", path, "--alpha", "0", "--weight", "0"]) == 2


def test_kernel_error_json(tmp_path, capsys):
    # phi of a window reaching degree -500 would need degree -1500
    path = dump(tmp_path, "w.json", LaurentWindow.from_dict(3, 12, -500, 40, {-500: 1}).to_json())
    assert main(["op", "--op", "phi", "--in", path]) == 3
    err = json.loads(capsys.readouterr().out)
    assert err["error"] == "WindowExhausted"


def test_exp_fixture(files, tmp_path):
    rep = str(tmp_path / "r.json")
    assert main(["exp", "--in", files["cu"], "--alpha", "1", "--weight", "1", "--h", "1", "--report", rep]) == 0
    r = read(rep)
    assert r["exp_step"]["ok"] and r["interpolation"] is None
    y = LaurentWindow.from_json(r["nabla_chain"]["f"])
    assert y.coeff(0) == PadicScalar.from_fraction(3, 0.5)


def test_exp_weight_zero_interpolation(files, tmp_path):
    rep = str(tmp_path / "r.json")
    assert main(["exp", "--in", files["cu"], "--alpha", "1", "--weight", "0", "--report", rep]) == 0
    assert read(rep)["interpolation"]["1"]["ok"]


def test_exp_zero(tmp_path):
    path = dump(tmp_path, "z.json", LaurentWindow.from_dict(3, 12, -8, 40, {}).to_json())
    rep = str(tmp_path / "r.json")
    assert main(["exp", "--in", path, "--alpha", "1", "--weight", "1", "--report", rep]) == 0
    assert LaurentWindow.from_json(read(rep)["nabla_chain"]["f"]).is_zero()


def test_exp_not_psi_fixed(files, capsys):
    assert main(["exp", "--in", files["T"], "--alpha", "1", "--weight", "0"]) == 4
    assert json.loads(capsys.readouterr().out)["error"] == "NotPsiFixed"


def test_col(files, capsys):
    assert main(["col", "--in", files["invT"]]) == 0
    assert main(["col", "--preimage", "1,2,3"]) == 0
    assert main(["col", "--preimage", "x"]) == 2


def test_verify_report_deterministic(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["verify", "--suite", "padic", "--report", a]) == 0
    assert main(["verify", "--suite", "padic", "--report", b]) == 0
    assert open(a).read() == open(b).read()
    r = read(a)
    assert r["pass"] and r["config"]["window"] == [-8, 40]


def test_verify_config_file(tmp_path):
    cfg = dump(tmp_path, "c.json", {"p": 5, "trials": 10, "seed": 7})
    rep = str(tmp_path / "r.json")
    assert main(["verify", "--suite", "cyclo", "--config", cfg, "--report", rep]) == 0
    assert read(rep)["config"]["p"] == 5
    bad = dump(tmp_path, "bad.json", {"prime": 5})
    assert main(["verify", "--suite", "cyclo", "--config", bad]) == 2


def test_verify_strict_tiny_window(tmp_path):
    rep = str(tmp_path / "r.json")
    args = ["verify", "--suite", "herr", "--window", "-2", "6", "--report", rep]
    assert main(args) == 0
    assert main(args + ["--strict"]) == 1
    assert any(c["status"] == "inconclusive" for c in read(rep)["cases"])
