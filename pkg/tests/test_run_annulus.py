import json
from pathlib import Path

import pytest

import run_annulus
from run_annulus import main, parse_config

CONFIG_DIR = Path(__file__).resolve().parents[1] / "config"
SKEIN = ["--skein", str(CONFIG_DIR / "skein_constants.json")]
COUNIT = ["--constants", str(CONFIG_DIR / "counit_constants.json")]


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_parse_config_collects_params():
    cfg = parse_config(["reduce", "--n", "4", "--strands", "3", "--word", "1 -2"])
    assert cfg.n == 4
    assert cfg.command == "reduce"
    assert cfg.params == {"strands": 3, "word": "1 -2", "strategy": "leftmost"}


def test_reduce(capsys):
    code, doc = _run(capsys, [*SKEIN, "reduce", "--n", "3", "--strands", "2", "--word", "1"])
    assert code == 0
    assert doc["schema"] == "1"
    assert doc["command"] == "reduce"
    assert doc["ok"] is True
    monomials = doc["result"]["reduction"]["monomials"]
    assert [m["gammas"] for m in monomials] == [[2]]
    assert monomials[0]["coeff"] == {"unit": "w_half", "terms": [[0, "1"]]}


def test_reduce_rejects_bad_word(capsys):
    code, doc = _run(capsys, [*SKEIN, "reduce", "--n", "3", "--strands", "2", "--word", "3"])
    assert code == 2
    assert doc is None


def test_invalid_n(capsys):
    code, _ = _run(capsys, ["matrices", "--n", "1"])
    assert code == 2


def test_unknown_command(capsys):
    code, _ = _run(capsys, ["explode"])
    assert code == 2


def test_matrices(capsys):
    code, doc = _run(capsys, ["matrices", "--n", "2", "--side", "right"])
    assert code == 0
    assert doc["result"]["side"] == "right"
    assert doc["result"]["matrix"]["triangle_n"] == 2


def test_pbeta(capsys):
    code, doc = _run(capsys, [*SKEIN, "pbeta", "--n", "3", "--i", "3"])
    assert code == 0
    result = doc["result"]
    assert result["closed_form"]["closed_form_match"] is True
    assert result["evaluations"]["1"]["ok"] is True
    assert "prefactor" not in result


def test_qtrace_web(capsys):
    code, doc = _run(capsys, [*COUNIT, "qtrace", "--n", "2", "--web", "B1"])
    assert code == 0
    assert doc["result"]["summary"]["ok"] is True
    assert doc["result"]["summary"]["highest_right"] == [0, 1, 1]


def test_qtrace_rejects_bad_web(capsys):
    code, _ = _run(capsys, [*COUNIT, "qtrace", "--n", "3", "--web", "B5"])
    assert code == 2


def test_independence(capsys):
    code, doc = _run(capsys, ["independence", "--n", "3", "--max-total", "3"])
    assert code == 0
    assert doc["result"]["injective"] is True


def test_fan_annulus(capsys):
    code, doc = _run(capsys, ["fan", "--n", "3", "--annulus", "--max-total", "2"])
    assert code == 0
    assert doc["result"]["count"] == 6
    assert doc["result"]["distinct"] is True


def test_fan_check_point(capsys, tmp_path):
    # the constant-n function on the non-corner vertices
    values = {"1,1,1": 3, "2,1,0": 3, "2,0,1": 3, "1,2,0": 3, "1,0,2": 3, "0,2,1": 3, "0,1,2": 3}
    path = tmp_path / "point.json"
    path.write_text(json.dumps({"n": 3, "values": values}), encoding="utf-8")
    code, doc = _run(capsys, ["fan", "--n", "3", "--check-point", str(path)])
    assert code == 0
    assert doc["result"]["membership"] == "fan"


def test_fan_check_point_missing_file(capsys, tmp_path):
    code, _ = _run(capsys, ["fan", "--n", "3", "--check-point", str(tmp_path / "nope.json")])
    assert code == 2


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out" / "reduce.json"
    code = main([*SKEIN, "--output", str(target), "reduce", "--n", "2", "--strands", "1"])
    assert code == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert doc["result"]["braid"] == {"strands": 1, "word": []}


def test_failed_verification_exits_one(capsys, monkeypatch):
    monkeypatch.setitem(run_annulus.COMMANDS, "matrices", lambda cfg: ({"side": "left"}, False))
    code, doc = _run(capsys, ["matrices", "--n", "2"])
    assert code == 1
    assert doc["ok"] is False


@pytest.mark.parametrize("jobs", ["0", "-1"])
def test_jobs_must_be_positive(capsys, jobs):
    code, _ = _run(capsys, ["--jobs", jobs, "selftest", "--n", "2"])
    assert code == 2


def test_pbeta_past_rank_exits_zero(capsys):
    code, doc = _run(capsys, [*SKEIN, "pbeta", "--n", "2", "--i", "3"])
    assert code == 0
    closed = doc["result"]["closed_form"]
    assert closed["closed_form_match"] is True
    assert closed["bad_set_required"] is False


def test_selftest_n3(capsys):
    code, doc = _run(capsys, ["selftest", "--n", "3"])
    assert code == 0
    rows = doc["result"]["suites"]
    assert {row["n"] for row in rows} == {2, 3}
    assert all(row["ok"] for row in rows)


def test_trace_suite_runs_independence_past_cap(monkeypatch):
    monkeypatch.setattr(run_annulus.settings, "SELFTEST_MAX_N", 2)
    assert run_annulus.suite_trace(6) == (1, 1)
    assert run_annulus.suite_trace(7) == (0, 0)


def test_trace_suite_n3():
    passed, total = run_annulus.suite_trace(3)
    assert passed == total == 5
