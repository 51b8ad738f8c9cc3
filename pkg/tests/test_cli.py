from __future__ import annotations

import json
import subprocess
import sys

import pytest

from padicstrat.cli import COMMANDS, run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_fixture_passes(capsys):
    code, out, _ = _run(capsys, "verify", "--fixture", "parabola", "--p", "3", "--m", "3")
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"


def test_verify_without_s0_fails_with_witness(capsys):
    code, out, _ = _run(capsys, "verify", "--fixture", "parabola", "--no-s0", "--m", "2", "--format", "text")
    assert code == 1
    assert "0:0,0" in out


def test_usage_error_prints_grammar(capsys):
    code, _, err = _run(capsys, "verify", "--bogus")
    assert code == 2
    assert "usage error" in err and "val" in err and "rv" in err
    code, _, err = _run(capsys)
    assert code == 2


def test_missing_inputs_is_usage_error(capsys):
    code, _, err = _run(capsys, "eval", "--expr", "x1 = 0")
    assert code == 2 and "--p, --m and --n" in err


def test_precision_exhausted_exit_code(capsys):
    code, _, err = _run(
        capsys, "jacobian", "--p", "3", "--m", "3", "--n", "1",
        "--set", "val(x1 - 1) >= 1", "--expr", "x1^3", "--z", "3",
    )
    assert code == 3 and "precision" in err


def test_jacobian_find_and_fail(capsys):
    args = ["jacobian", "--p", "3", "--m", "3", "--n", "1", "--expr", "x1^2"]
    code, out, _ = _run(capsys, *args, "--set", "val(x1 - 1) >= 1")
    assert code == 0 and json.loads(out)["z"] == [2]
    code, out, _ = _run(capsys, *args, "--set", "x1 = x1", "--z", "2")
    assert code == 1 and json.loads(out)["witness"] == [[0], [1]]


def test_tree_dot_and_json(capsys, tmp_path):
    base = ["tree", "--fixture", "parabola", "--m", "2"]
    code, dot, _ = _run(capsys, *base, "--format", "dot")
    assert code == 0 and dot.startswith("digraph T {")
    code, js, _ = _run(capsys, *base)
    assert json.loads(js)["ball"] == {"depth": 0, "residue": [0, 0]}
    target = tmp_path / "t.json"
    assert run(base + ["--out", str(target)]) == 0
    assert target.read_text() == js


def test_dot_only_for_tree(capsys):
    code, _, _ = _run(capsys, "fixtures", "--format", "dot")
    assert code == 2


def test_output_is_deterministic(capsys):
    argv = ["stratify", "--fixture", "hyperbola", "--m", "3", "--seed", "7"]
    _, a, _ = _run(capsys, *argv)
    _, b, _ = _run(capsys, *argv)
    assert a == b and a


def test_stratify_then_verify(capsys, tmp_path):
    path = tmp_path / "s.json"
    assert run(["stratify", "--fixture", "cusp", "--m", "2", "--out", str(path)]) == 0
    code, out, _ = _run(capsys, "verify", "--strat", str(path))
    assert code == 0


def test_eval_counts(capsys):
    code, out, _ = _run(capsys, "eval", "--p", "3", "--m", "2", "--n", "2", "--expr", "x2 - x1^2 = 0")
    assert code == 0 and json.loads(out)["size"] == 9


def test_every_command_has_help():
    for name in COMMANDS:
        r = subprocess.run([sys.executable, "-m", "padicstrat", name, "--help"], capture_output=True, text=True)
        assert r.returncode == 0 and "--format" in r.stdout


def test_acceptance_single_criterion(capsys):
    code, out, _ = _run(capsys, "acceptance", "--criterion", "10", "--format", "text")
    assert code == 0 and out.startswith("PASS")
    code, _, _ = _run(capsys, "acceptance", "--criterion", "99")
    assert code == 2
