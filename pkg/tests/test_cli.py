import json

import pytest

from tropos import cli
from tropos.errors import ResolutionError
from tropos.selftest import CHECKS


def run(tmp_path, *argv, name="out.txt"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def test_newton_two_breakpoints(tmp_path):
    code, text = run(tmp_path, "newton", "--poly", "1,-5/2,1", "--p", "2")
    assert code == 0
    data = json.loads(text)
    assert data["pwa"]["breakpoints"] == ["-1", "1"]
    assert data["divisor"] == data["root_valuations"]
    assert data["meta"]["command"] == "newton"


def test_newton_from_file(tmp_path):
    from tropos.newton import ValuedSeries

    spec = tmp_path / "s.json"
    spec.write_text(json.dumps(ValuedSeries.from_polynomial([4, 0, 1], 2).to_json()))
    code, text = run(tmp_path, "newton", "--in", str(spec))
    data = json.loads(text)
    assert code == 0 and data["divisor"]["atoms"] == [["1", "2"]]
    assert len(data["meta"]["inputs"]["in"]) == 64


def test_lift_rows(tmp_path):
    code, text = run(tmp_path, "lift", "--density", "fig4", "--K", "1000")
    lines = text.splitlines()
    assert code == 0
    assert lines[0].startswith("# {") and lines[1] == "k,sign,position"
    assert len(lines) == 2 + 4002


def test_lift_pairing(tmp_path):
    code, text = run(tmp_path, "lift", "--K", "2000", "--pair", "psi=poly:0,1", "--strip", "0.2:0.6")
    data = json.loads(text)
    assert code == 0
    assert data["pairing"] == pytest.approx(0.1, abs=5e-3)
    assert data["strip_count"] == pytest.approx(data["cdf_difference"], abs=0.01)


def test_negative_range_glued(tmp_path):
    code, text = run(tmp_path, "apseq", "--p", "3", "--range", "-3:3")
    assert code == 0
    rows = text.splitlines()[2:]
    assert rows[0] == "-3,1,3" and rows[3] == "0,0,1" and len(rows) == 7


def test_weil_explicit_on_sample(tmp_path):
    code, text = run(tmp_path, "weil", "--check", "explicit", "--zeros", "sample100.txt", "--f", "bump:2.1,2.9")
    data = json.loads(text)
    assert code == 0
    assert data["zeros_used"] == 100 and data["relative_residual"] < 0.01
    assert "zeros" in data["meta"]["inputs"]


def test_weil_omega(tmp_path):
    code, text = run(tmp_path, "weil", "--check", "omega")
    assert code == 0 and json.loads(text)["omega_at_one"] == pytest.approx(0.0690662315300007, abs=1e-12)


def test_data_dir(tmp_path, monkeypatch):
    zeros = tmp_path / "mine.txt"
    zeros.write_text("14.134725141734693790\n21.022039638771554993\n")
    monkeypatch.setenv("TROPOS_DATA_DIR", str(tmp_path))
    code, text = run(tmp_path, "weil", "--zeros", "mine.txt", "--f", "bump:2.1,2.9")
    assert code == 0 and json.loads(text)["zeros_used"] == 2


def test_witt_and_pwa(tmp_path):
    code, text = run(tmp_path, "witt", "--check", "frobenius", "--grid", "8x8", "--lambdas", "1")
    assert code == 0
    rows = [r.split(",") for r in text.splitlines()[2:]]
    assert len(rows) == 3 and all(r[4] == "1" and float(r[5]) == 0 for r in rows)
    code, text = run(tmp_path, "pwa", "--op", "rr", "--divisor", "-2@0,1@1,1@3", "--domain", "-5:5", name="rr.json")
    data = json.loads(text)
    assert code == 0 and all(int(m) >= 0 for _, m in data["sum"]["atoms"])


def test_byte_reproducible(tmp_path):
    argv = ("jessen", "--sum", "1,-1@log2", "--strip", "-1:1", "--T", "200")
    _, a = run(tmp_path, *argv, name="a.json")
    _, b = run(tmp_path, *argv, name="b.json")
    assert a == b


def test_exit_codes(tmp_path, monkeypatch, capsys):
    assert cli.main(["frobnicate"]) == 64
    assert run(tmp_path, "weil", "--check", "explicit", "--zeros", "nope.txt", "--f", "bump:2,3")[0] == 2
    assert run(tmp_path, "newton")[0] == 2
    assert run(tmp_path, "lift", "--density", "gaussian")[0] == 2
    assert cli.main(["apseq", "--threads", "0"]) == 2

    from tropos import jessen

    def boom(*a, **k):
        raise ResolutionError("zero on the contour after 5 retries")

    monkeypatch.setattr(jessen, "zero_density_check", boom)
    assert run(tmp_path, "jessen", "--sum", "1,-1@log2", "--strip", "-1:1")[0] == 3
    assert "resolution error" in capsys.readouterr().err


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_selftest(name, capsys):
    assert cli.main([name, "--selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_weil_quadratic_projects(tmp_path):
    code, text = run(tmp_path, "weil", "--check", "quadratic", "--f", "gauss:2.2,0.15,1.6,3.2")
    data = json.loads(text)
    assert code == 0
    assert max(abs(m) for m in data["moments"]) < 1e-12
    assert data["s_ff"] < 0
