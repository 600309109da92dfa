import datetime as dt
import json

import pytest

from ordlab.cli import run

NOW = dt.datetime(2024, 1, 1, tzinfo=dt.timezone.utc)


def report(capsys, argv, code=0):
    assert run(argv, now=NOW) == code
    return json.loads(capsys.readouterr().out)


def test_curvature_flat(capsys):
    rep = report(capsys, ["curvature", "--metric", "euclidean:3", "--points", "10"])
    assert rep["pass"] and rep["failures"] == []
    assert rep["result"]["direct"] == [0.0] * 10 == rep["result"]["christoffel"]


def test_curvature_sphere_numeric(capsys):
    # the five-term expression fails on curved metrics; the other two routes agree
    rep = report(capsys, ["curvature", "--metric", "stereo-sphere:3:1", "--numeric", "--points", "4"], code=1)
    assert [c["name"] for c in rep["checks"]] == [
        "direct_vs_christoffel", "completed_vs_christoffel", "conformal_vs_christoffel"
    ]
    assert rep["failures"] == ["direct_vs_christoffel"]


def test_exponents(capsys):
    rep = report(capsys, ["exponents", "--n", "3", "--metric", "conf-gauss:3:0.25"])
    betas = sorted(r["beta"] for r in rep["result"]["roots"])
    assert betas == pytest.approx([0, 1 / 12], abs=1e-8)
    assert rep["result"]["roots"][-1]["fitted_C"] == pytest.approx(-0.125, abs=1e-4)


def test_hydrogen_csv(capsys):
    assert run(["hydrogen", "--n-max", "3", "--m", "0", "--format", "csv"], now=NOW) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,l,m,E_closed")
    assert len(lines) == 7


@pytest.mark.parametrize(
    "argv",
    [
        ["potential", "--spec", "conformal", "--metric", "stereo-sphere:3:1", "--expect-c", "-0.125"],
        ["potential", "--method", "nested", "--points", "3"],
        ["rank", "--family", "poly-square:3:1-2:0.3"],
        ["rank", "--family", "conf-gauss:3:0.25", "--expect", "2", "--points", "10"],
        ["identities", "--metric", "poly-square:4:2:0.3"],
        ["oscillator"],
    ],
)
def test_commands_pass(capsys, argv):
    rep = report(capsys, argv)
    assert rep["pass"], rep["failures"]


def test_failing_check_exits_one(capsys):
    rep = report(capsys, ["oscillator", "--tol", "1e-30"], code=1)
    assert rep["failures"] == ["potential", "ground_state"]


def test_reports_are_deterministic(capsys, tmp_path):
    argv = ["potential", "--points", "4", "--seed", "5", "--format", "json"]
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(argv + ["--out", str(a)], now=NOW) == 0
    assert run(argv + ["--out", str(b)], now=NOW) == 0
    assert a.read_bytes() == b.read_bytes()
    body = json.loads(a.read_text())
    assert body["timestamp"] == NOW.isoformat()
    assert body["config"]["seed"] == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["curvature", "--metric", "nope:3"],
        ["hydrogen", "--m", "0-x"],
        ["rank", "--family", "poly-square:3:a-b:0.3"],
        ["exponents", "--n", "4", "--metric", "conf-gauss:3:0.25"],
        ["oscillator", "--out", "/nonexistent-dir/x.json"],
        ["rank", "--family", "euclidean:3", "--points", "3"],
    ],
)
def test_input_errors_exit_two(capsys, argv):
    assert run(argv, now=NOW) == 2
    assert "error" in capsys.readouterr().err


def test_table_format(capsys):
    assert run(["identities", "--format", "table", "--points", "2"], now=NOW) == 0
    out = capsys.readouterr().out
    assert out.startswith("identities: PASS")
