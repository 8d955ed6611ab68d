"""Command-line behaviour: canonical invocations and exit codes."""

import csv
import io

import numpy as np
import pytest

from hs2.cli import main
from hs2.examples import example
from hs2.stateio import parse_state, print_state


def run(capsys, *argv):
    """Invoke the CLI; returns (exit_code, stdout, stderr)."""
    try:
        code = main(list(argv))
    except SystemExit as stop:
        code = stop.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def ex36_file(tmp_path):
    path = tmp_path / "ex36.state"
    path.write_text(print_state(example("ex36", 0.0)), encoding="utf-8")
    return str(path)


def test_example_writes_state(tmp_path, capsys):
    out = tmp_path / "s.state"
    code, _, _ = run(capsys, "example", "ex26", "-o", str(out))
    assert code == 0
    state = parse_state(out.read_text(encoding="utf-8"))
    assert state.energy.atom_mass_at(0.0) == 0.5


def test_evolve_through_breaking_lists_atom(ex36_file, capsys):
    code, out, _ = run(capsys, "evolve", "--t", "2", ex36_file)
    assert code == 0
    atoms_section = out.split("[mu.atoms]")[1]
    assert atoms_section.split()[:2] == ["-0.25", "1"]


def test_evolve_zero_time_round_trips_bytes(ex36_file, tmp_path, capsys):
    out_path = tmp_path / "rt.state"
    code, _, _ = run(capsys, "evolve", "--t", "0", ex36_file,
                     "-o", str(out_path))
    assert code == 0
    original = open(ex36_file, "rb").read()
    assert out_path.read_bytes() == original


def test_metric_table(ex36_file, tmp_path, capsys):
    other = tmp_path / "b.state"
    other.write_text(print_state(example("ex36", 0.5)), encoding="utf-8")
    code, out, _ = run(capsys, "metric", ex36_file, str(other),
                       "--t", "0,1,2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("lower ") and lines[1].startswith("upper ")
    rows = [line for line in lines if line.endswith(" true")]
    assert len(rows) == 3


def test_breaking_report(ex36_file, capsys):
    code, out, _ = run(capsys, "breaking", ex36_file)
    assert code == 0
    assert "first_time 2" in out
    assert "first_location -0.25" in out


def test_transform_round_trip(ex36_file, tmp_path, capsys):
    lag = tmp_path / "lag.state"
    code, _, _ = run(capsys, "transform", "to-lagrangian", ex36_file,
                     "-o", str(lag))
    assert code == 0
    assert "[y]" in lag.read_text(encoding="utf-8")
    code, out, _ = run(capsys, "transform", "to-eulerian", str(lag))
    assert code == 0
    state = parse_state(out)
    assert state.energy.atom_mass_at(0.0) == pytest.approx(0.5, abs=1e-13)


def test_validate_ok(ex36_file, capsys):
    code, out, _ = run(capsys, "validate", ex36_file)
    assert code == 0
    assert "ok" in out.splitlines()


def test_validate_invalid_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.state"
    bad.write_text("[u]\n-1 1\n0 0\n[rho]\n[mu.density]\n-1 0 7\n"
                   "[mu.atoms]\n", encoding="utf-8")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert "energy-compatibility" in err


def test_malformed_exits_two(tmp_path, capsys):
    bad = tmp_path / "mangled.state"
    bad.write_text("[u]\n0 zero\n", encoding="utf-8")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert "non-numeric" in err


def test_missing_file_exits_two(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/nowhere.state")
    assert code == 2
    assert "cannot read" in err


def test_unknown_example_exits_two(capsys):
    code, _, err = run(capsys, "example", "ex99")
    assert code == 2
    assert "error:" in err


def test_stdin_input(monkeypatch, capsys):
    text = print_state(example("ex26"))
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out, _ = run(capsys, "validate", "-")
    assert code == 0
    assert "kind eulerian" in out


def test_tolerance_flag(tmp_path, capsys):
    near = tmp_path / "near.state"
    near.write_text("[u]\n0 0\n1 1\n[rho]\n[mu.density]\n0 1 1.0000000005\n"
                    "[mu.atoms]\n", encoding="utf-8")
    code, _, _ = run(capsys, "validate", str(near))
    assert code == 0
    code, _, _ = run(capsys, "validate", str(near), "--tol", "1e-12")
    assert code == 1


def test_tolerance_env(tmp_path, capsys, monkeypatch):
    near = tmp_path / "near.state"
    near.write_text("[u]\n0 0\n1 1\n[rho]\n[mu.density]\n0 1 1.0000000005\n"
                    "[mu.atoms]\n", encoding="utf-8")
    monkeypatch.setenv("HS2_TOL", "1e-12")
    code, _, _ = run(capsys, "validate", str(near))
    assert code == 1


def test_residual_table(ex36_file, capsys):
    code, out, _ = run(capsys, "residual", ex36_file,
                       "--t-max", "1.0", "--nodes", "32")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split() == ["name", "velocity", "density", "energy",
                                "max_abs"]
    assert len(lines) == 4


def test_plot_export(ex36_file, tmp_path, capsys):
    out_csv = tmp_path / "plot.csv"
    code, _, _ = run(capsys, "evolve", "--t", "1", ex36_file,
                     "-o", str(tmp_path / "moved.state"),
                     "--plot", str(out_csv),
                     "--plot-times", "5", "--plot-points", "41",
                     "--plot-range", "-2", "2")
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert len(rows) == 5 * 41
    assert set(rows[0]) == {"t", "x", "u", "rho", "cdf"}
    last = [r for r in rows if float(r["t"]) == 1.0]
    assert max(float(r["cdf"]) for r in last) == pytest.approx(2.5)


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0
    assert out.startswith("hs2 ")
