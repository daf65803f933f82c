import csv
import io
import json

import pytest

from lisdist.cli import Config, load_config, main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_selftest_quick(capsys):
    rc, out, _ = run(capsys, "selftest", "--quick")
    assert rc == 0
    assert "FAIL" not in out and out.count("PASS") >= 10


def test_usage_error(capsys):
    rc, _, err = run(capsys, "tw", "eval", "--t", "0", "--bogus", "1")
    assert rc == 2 and "--bogus" in err


def test_missing_command(capsys):
    assert run(capsys)[0] == 2


def test_domain_error_exit(capsys):
    rc, _, err = run(capsys, "stirling", "eval", "--n", "5", "--l", "2")
    assert rc == 2 and "lisdist:" in err


def test_computational_failure_exit(capsys):
    rc, _, err = run(capsys, "lis", "exact", "--n", "81")
    assert rc == 1 and "computation failed" in err


def test_tw_eval(capsys):
    rc, out, _ = run(capsys, "tw", "eval", "--t", "0")
    obj = json.loads(out)
    assert rc == 0 and obj["value"] == pytest.approx(0.9694, abs=1e-4)


def test_tw_grid_csv(capsys):
    rc, out, _ = run(capsys, "tw", "grid", "--a", "-2", "--b", "2", "--n", "5", "--k", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert rc == 0 and rows[0] == ["t", "F1"] and len(rows) == 6
    assert "\r" not in out


def test_lis_exact_rationals(capsys):
    rc, out, _ = run(capsys, "lis", "exact", "--n", "3", "--l", "2", "--out", "json")
    assert rc == 0
    assert json.loads(out) == [{"n": 3, "l": 2, "numerator": "5", "denominator": "6"}]


def test_lis_mc_seed(capsys):
    a = run(capsys, "lis", "mc", "--n", "30", "--samples", "50", "--seed", "4")[1]
    b = run(capsys, "lis", "mc", "--n", "30", "--samples", "50", "--seed", "4")[1]
    assert a == b and json.loads(a)["seed"] == 4


def test_poisson(capsys):
    rc, out, _ = run(capsys, "poisson", "eval", "--z", "4", "--l", "4")
    obj = json.loads(out)
    assert abs(obj["series_real"] - obj["e2_hard"]) <= 1e-10


def test_moments_table(capsys):
    rc, out, _ = run(capsys, "moments", "table")
    assert rc == 0 and json.loads(out)["M1"] == pytest.approx(-1.7710868074116016, abs=1e-8)


def test_fform_u(capsys):
    rc, out, _ = run(capsys, "fform", "u", "--j", "3", "--k", "0")
    obj = json.loads(out)
    assert json.loads(obj["coefficients"]) == [["7/12"], ["0", "1/3"], ["0"], ["1/24"]]


def test_fform_table_csv(capsys):
    rc, out, _ = run(capsys, "fform", "table", "--max", "3", "--out", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rc == 0 and len(rows) == 6 and rows[0]["key"] == "u00"


def test_expansion_coeff(capsys):
    rc, out, _ = run(capsys, "expansion", "coeff", "--family", "F", "--j", "1", "--t", "0")
    assert rc == 0 and "value" in json.loads(out)


def test_expansion_figure(capsys):
    rc, out, _ = run(capsys, "expansion", "figure", "--which", "3", "--n", "1000")
    rows = list(csv.reader(io.StringIO(out)))
    assert rc == 0 and rows[0][:4] == ["l", "t", "F", "m1"]


def test_stirling_and_depoisson(capsys):
    assert set(json.loads(run(capsys, "stirling", "eval", "--n", "40", "--l", "10")[1])) == {"S", "r_n", "a", "b"}
    obj = json.loads(run(capsys, "depoisson", "sandwich", "--n", "20", "--l", "6")[1])
    assert obj["holds"] is True


def test_specfun(capsys):
    rc, out, _ = run(capsys, "specfun", "olver", "--kmax", "2")
    assert rc == 0 and out.count("\n") == 6
    assert json.loads(run(capsys, "specfun", "bessel", "--nu", "1", "--x", "0")[1])["value"] == 0


def test_digits_flag(capsys):
    out = run(capsys, "--digits", "3", "tw", "eval", "--t", "0")[1]
    assert json.loads(out)["value"] == 0.969


def test_config_file(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "lis.cfg"
    cfg.write_text("# comment\ndigits = 4\nseed = 9\n")
    assert load_config(str(cfg)) == Config(digits=4, seed=9)
    monkeypatch.setenv("LIS_CONFIG", str(cfg))
    out = json.loads(run(capsys, "lis", "mc", "--n", "10", "--samples", "5")[1])
    assert out["seed"] == 9


def test_config_rejects_unknown(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    monkeypatch.setenv("LIS_CONFIG", str(cfg))
    rc, _, err = run(capsys, "moments", "table")
    assert rc == 2 and "colour" in err


def test_config_rejects_nonpositive(capsys):
    rc, _, err = run(capsys, "--m", "0", "tw", "eval", "--t", "0")
    assert rc == 2 and "m must be positive" in err
