import json
import subprocess
import sys

import pytest

from si3.catalog import DATA_FILE
from si3.cli import CheckFailed, Report, UsageError, main, run


def strip_timing(d):
    if isinstance(d, dict):
        return {k: strip_timing(v) for k, v in d.items() if k not in ("seconds", "timing")}
    if isinstance(d, list):
        return [strip_timing(v) for v in d]
    return d


def run_json(argv, capsys):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def broken_catalog(tmp_path, monkeypatch):
    text = DATA_FILE.read_text()
    bad = text.replace("sum_x2 = 9/x^2 + 9/y^2 + 9/z^2", "sum_x2 = 8/x^2 + 9/y^2 + 9/z^2", 1)
    assert bad != text
    path = tmp_path / "catalog.txt"
    path.write_text(bad)
    monkeypatch.setenv("SI3_CATALOG", str(path))
    return path


def test_parse(capsys):
    code, out = run_json(["parse", "(x+i*y)^2"], capsys)
    assert code == 0
    assert out["checks"][0]["details"]["canonical"] == "x^2 + 2*i*x*y - y^2"


def test_parse_error_is_usage(capsys):
    assert main(["parse", "x^2+"]) == 2
    assert "cannot parse" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["frobnicate"], ["verify", "system", "Q"], ["isotropy", "A", "--point", "1,2"],
    ["simulate", "I", "--dt", "-1"], [],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_usage_error_as_json(capsys):
    code, out = run_json(["isotropy", "A", "--point", "x,1,2"], capsys)
    assert code == 2 and out["exit_status"] == 2 and "error" in out


def test_isotropy_of_last_system(capsys):
    code, out = run_json(["isotropy", "A"], capsys)
    assert code == 0
    details = out["checks"][0]["details"]
    assert details["dimension"] == 4
    assert "J1 + i*J2" in details["basis"]


def test_isotropy_at_chosen_point(capsys):
    code, out = run_json(["isotropy", "I", "--point", "1/2,2,-3"], capsys)
    assert code == 0 and out["checks"][0]["details"]["dimension"] == 0


def test_dim_symmetries(capsys):
    code, out = run_json(["dim-symmetries", "VII"], capsys)
    assert code == 0 and out["checks"][0]["details"]["dimension"] == 6


def test_verify_system_passes(capsys):
    code, out = run_json(["verify", "system", "I", "--skip-numeric"], capsys)
    assert code == 0
    names = [c["name"] for c in out["checks"]]
    assert names == ["I:" + n for n in ("symmetries", "symmetry-dimension", "brackets", "canonical",
                                        "identities", "diffconds", "invariants", "table")]
    assert out["checks"][0]["details"]["killing"] == [True] * 6
    assert all(c["status"] != "fail" for c in out["checks"])


def test_text_report(capsys):
    assert main(["verify", "system", "IV", "--skip-numeric"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_json_round_trip(capsys):
    _, out = run_json(["table"], capsys)
    rep = Report.from_dict(out)
    assert json.loads(rep.to_json()) == out


def test_reports_are_deterministic(capsys):
    _, a = run_json(["verify", "system", "II", "--skip-numeric"], capsys)
    _, b = run_json(["verify", "system", "II", "--skip-numeric"], capsys)
    assert strip_timing(a) == strip_timing(b)


def test_table_and_separability(capsys):
    code, out = run_json(["table"], capsys)
    assert code == 0 and len(out["checks"]) == 10
    code, out = run_json(["separability"], capsys)
    assert code == 0


def test_brackets(capsys):
    code, out = run_json(["brackets", "I"], capsys)
    assert code == 0
    assert out["checks"][0]["details"]["third_order_dim"] == 4


def test_simulate(capsys):
    code, out = run_json(["simulate", "I", "--seed", "1", "--t", "1"], capsys)
    assert code == 0
    assert all(c["status"] == "pass" for c in out["checks"])


def test_check_failure_exit_code(broken_catalog, capsys):
    code, out = run_json(["verify", "system", "I", "--skip-numeric"], capsys)
    assert code == 1 and out["exit_status"] == 1
    failed = [c["name"] for c in out["checks"] if c["status"] == "fail"]
    assert failed == ["I:table"]


def test_strict_run_raises(broken_catalog):
    with pytest.raises(CheckFailed) as err:
        run(["verify", "system", "I", "--skip-numeric"], strict=True)
    assert err.value.report.exit_status == 1
    rep = run(["verify", "system", "I", "--skip-numeric"])
    assert rep.exit_status == 1


def test_run_raises_usage():
    with pytest.raises(UsageError):
        run(["isotropy"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "si3", "parse", "1/x", "--json"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["exit_status"] == 0
