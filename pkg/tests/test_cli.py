from __future__ import annotations

import os
import subprocess
import sys

import pytest

from proofstrat.cli import main
from proofstrat.textio import bundled_theory_path

THY = bundled_theory_path()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_proves(capsys):
    code, out, _ = run(capsys, "check", THY, "conj1", "long")
    assert code == 0 and "proved in 9 steps" in out


def test_check_failure_exit_1(capsys):
    code, out, _ = run(capsys, "check", THY, "conj2", "long")
    assert code == 1 and out.splitlines()[-2].startswith("failed")


@pytest.mark.parametrize("argv", [
    ["check", THY, "conj1", "missing"],
    ["check", THY, "missing", "long"],
    ["check", "/nonexistent.thy", "conj1", "long"],
])
def test_parse_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["frobnicate"])
    assert ei.value.code == 2


def test_generalise_writes_snapshots(capsys, tmp_path):
    code, out, _ = run(capsys, "generalise", THY, "conj1", "long", str(tmp_path))
    assert code == 0
    files = sorted(os.listdir(tmp_path))
    assert "strategy.strat" in files and "strategy.dot" in files and "steps.log" in files
    assert files.count("step-000.strat") == 1
    assert len([f for f in files if f.endswith(".strat")]) == 9
    log = (tmp_path / "steps.log").read_text().splitlines()
    assert log[0] == "step-000 trace" and log[-1] == "step-007 loop1 t5,t7"


def test_generalise_is_deterministic(capsys, tmp_path):
    run(capsys, "generalise", THY, "conj1", "long", str(tmp_path / "a"))
    run(capsys, "generalise", THY, "conj1", "long", str(tmp_path / "b"))
    for name in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_eval_exit_codes(capsys, tmp_path):
    run(capsys, "generalise", THY, "conj1", "long", str(tmp_path))
    strat = str(tmp_path / "strategy.strat")
    code, out, _ = run(capsys, "eval", THY, "conj2", strat)
    assert code == 0 and "proved after 4 tactic applications" in out
    code, out, _ = run(capsys, "eval", THY, "nopure", strat)
    assert code == 1 and "no fact for class P" in out
    code, out, _ = run(capsys, "eval", THY, "conj1", strat, "--budget", "2")
    assert code == 4
    bad = tmp_path / "bad.strat"
    bad.write_text("strategy\n")
    assert run(capsys, "eval", THY, "conj1", str(bad))[0] == 2


@pytest.mark.parametrize("argv, expected", [
    (["meet", "top_symbol", "[[/\\]]", "[[*]]"], "bot"),
    (["join", "top_symbol", "[[*]]", "[[/\\]]"], "[[/\\],[*]]"),
    (["join", "has_symbol", "[[*,/\\],[\\/,*]]", "[[*,/\\,\\/]]"], "[[/\\,*],[*,\\/]]"),
    (["orthogonal", "{top_symbol: [[/\\]]}", "{top_symbol: [[*]]}"], "true"),
    (["subtype", "{top_symbol: [[*]], has_symbol: [[*,/\\,\\/]]}",
      "{top_symbol: [[*]], has_symbol: [[*,/\\],[\\/,*]]}"], "true"),
])
def test_lattice(capsys, argv, expected):
    code, out, _ = run(capsys, "lattice", *argv)
    assert code == 0 and out.strip() == expected


def test_lattice_bad_operand(capsys):
    assert run(capsys, "lattice", "meet", "[[*]", "[[*]]")[0] == 2


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "proofstrat.cli", "check", THY, "trivial", "one"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "proved in 1 steps" in r.stdout
