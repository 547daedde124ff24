import csv
import io
import json
import math
import subprocess
import sys

import pytest

from remad.capacities import qubit_adc_capacity
from remad.cli import CSV_HEADER, EXIT_DOMAIN, main, run_scan, rows_to_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_info_identity(capsys):
    code, out, _ = run(capsys, "info", "--gamma10", "0", "--gamma21", "0", "--gamma20", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "Degradable"
    assert rep["Q"]["value"] == pytest.approx(math.log2(3), abs=1e-9)
    assert rep["CE"] == pytest.approx(2 * math.log2(3), abs=1e-9)
    assert rep["tolerances"]["cptp"] == 1e-9


def test_info_beamsplitter(capsys):
    code, out, _ = run(capsys, "info", "--eta", "0.4")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "Antidegradable" and rep["Q"]["value"] == 0


def test_info_gamma10_zero_plane(capsys):
    code, out, _ = run(capsys, "info", "--gamma21", "0.3", "--gamma20", "0.3")
    rep = json.loads(out)
    assert rep["verdict"] == "Neither"
    assert rep["Q"]["value"] == 1.0 and rep["Q"]["method"] == "ClosedForm"


def test_info_transition_file(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("# ququart\n1\n0.2 0.8\n0.04 0.32 0.64\n0.008 0.096 0.384 0.512\n")
    code, out, _ = run(capsys, "info", "--transition", str(f))
    rep = json.loads(out)
    assert code == 0 and rep["dim"] == 4 and rep["verdict"] == "Degradable"


@pytest.mark.parametrize(
    "argv",
    [
        ["info", "--gamma21", "0.7", "--gamma20", "0.7"],
        ["info", "--eta", "1.5"],
        ["info", "--eta", "0.5", "--gamma10", "0.1"],
        ["--tolerance", "bogus=1", "info"],
        ["scan", "--plane", "g10", "--fixed-value", "0", "--resolution", "1"],
        ["scan", "--plane", "g10", "--fixed-value", "2", "--resolution", "3"],
        ["capacity", "--transition", "/nonexistent/file"],
    ],
)
def test_domain_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_DOMAIN and err.startswith("remad:")


def test_compose(capsys):
    code, out, _ = run(capsys, "compose", "--eta", "0.5", "--then-eta", "0.8")
    rep = json.loads(out)
    assert rep["closed"] and rep["composite"] == pytest.approx([0.6, 0.48, 0.36], abs=1e-15)
    code, out, _ = run(capsys, "compose", "--gamma10", "0.5", "--gamma21", "0.3", "--gamma20", "0.1",
                       "--then-gamma10", "0.5", "--then-gamma21", "0.3", "--then-gamma20", "0.1")
    rep = json.loads(out)
    assert not rep["closed"] and rep["constraint_residual"] == pytest.approx(0.0525)


def test_compose_identity(capsys):
    code, out, _ = run(capsys, "compose", "--then-gamma10", "0.2", "--then-gamma21", "0.3", "--then-gamma20", "0.4")
    rep = json.loads(out)
    assert rep["closed"] and rep["composite"] == pytest.approx([0.2, 0.3, 0.4])


def test_capacity_tolerance_override(capsys):
    code, out, _ = run(capsys, "--tolerance", "cptp=1e-8", "capacity", "--gamma10", "0.3", "--gamma20", "0.8")
    rep = json.loads(out)
    assert code == 0 and rep["Q"]["value"] == qubit_adc_capacity(0.3)


def test_scan_small_plane(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "scan", "--plane", "g10", "--fixed-value", "0", "--resolution", "3",
                     "--out", str(out), "--jobs", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 9 and list(rows[0]) == CSV_HEADER
    for r in rows:
        s = float(r["gamma21"]) + float(r["gamma20"])
        if s > 1:
            assert r["class"] == "OutOfDomain" and r["Q"] == ""
        elif s >= 0.5:
            assert r["Q"] == "1" and r["Q_method"] == "ClosedForm"


def test_scan_gamma21_plane_quadrants():
    rows = run_scan("g21", 0.0, 11, ["Q"], opt_resolution=60)
    assert len(rows) == 121
    for r in rows:
        x, y = r["gamma10"], r["gamma20"]
        if min(x, y) >= 0.5:
            assert r["Q"] == 0.0
        elif max(x, y) >= 0.5:
            assert r["Q"] == qubit_adc_capacity(min(x, y))


def test_scan_deterministic_and_parallel():
    a = rows_to_csv(run_scan("g20", 0.2, 5, opt_resolution=40, jobs=1))
    b = rows_to_csv(run_scan("g20", 0.2, 5, opt_resolution=40, jobs=2))
    assert a == b
    classes = {r.split(",")[3] for r in a.splitlines()[1:]}
    assert classes <= {"Degradable", "Antidegradable", "Neither", "SingularCase", "OutOfDomain"}


def test_scan_unknown_bracket_format():
    rows = run_scan("g10", 0.3, 5, ["class", "Q", "Cp"], opt_resolution=40)
    text = rows_to_csv(rows)
    unknown = [r for r in csv.DictReader(io.StringIO(text)) if r["Q_method"] == "Unknown"]
    assert unknown
    for r in unknown:
        lo, hi = map(float, r["Q"].split(":"))
        assert lo <= hi and r["Cp"] == ""


def test_scan_json(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "scan", "--plane", "g21", "--fixed-value", "0", "--resolution", "2",
                     "--format", "json", "--quantities", "class,CE", "--out", str(out))
    data = json.loads(out.read_text())
    assert code == 0 and len(data) == 4 and data[0]["CE"] == pytest.approx(2 * math.log2(3))


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "remad", "info", "--eta", "2"], capture_output=True, text=True)
    assert r.returncode == EXIT_DOMAIN


def test_numeric_failure_exit_code(monkeypatch, capsys):
    import remad.cli as cli
    from remad.errors import SingularError

    def boom(*a, **k):
        raise SingularError("forced")

    monkeypatch.setattr(cli, "classify_qutrit", boom)
    code = main(["info", "--gamma10", "0.3", "--gamma21", "0.2", "--gamma20", "0.1"])
    assert code == cli.EXIT_NUMERIC
    assert "numeric failure" in capsys.readouterr().err
