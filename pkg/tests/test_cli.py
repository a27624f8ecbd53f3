from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from necklace.cli import main, parse_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_report_envelope(capsys):
    code, rep = run_json(capsys, "modular", "--c", "1/2")
    assert code == 0
    assert rep["schema_version"] == 1 and rep["command"] == "modular"
    assert {"conventions", "assumptions", "config", "status", "result"} <= set(rep)
    assert rep["status"] == "PASS"


def test_formal_mode_zero(capsys):
    code, rep = run_json(capsys, "formal", "--mode", "0", "--degree", "6")
    assert code == 0 and rep["result"]["dims"] == [1, 2, 1]


def test_area_command(capsys):
    code, rep = run_json(capsys, "area", "--c", "3", "--quad-points", "8192")
    assert code == 0
    assert abs(rep["result"]["value"] - 2 * math.pi * math.log(2)) < 1e-6


def test_area_degenerate_is_module_error(capsys):
    code, rep = run_json(capsys, "area", "--c", "1/2")
    assert code == 1 and rep["error"].startswith("DegenerateFamily")


def test_jacobi_text(capsys):
    code, out = run(capsys, "jacobi", "--structure", "su2-r4", "--format", "text")
    assert code == 0
    assert "[pi, pi] = 0" in out
    code, rep = run_json(capsys, "jacobi", "--structure", "su2-r4")
    assert rep["result"]["jacobiator"] == "0"


@pytest.mark.parametrize("argv", [["area", "--c", "0.5"], ["bogus"], ["formal", "--degree", "1"],
                                  ["area", "--quad-points", "10"], ["global", "--modes", "0"],
                                  ["formal", "--nope"]])
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    capsys.readouterr()


def test_negative_scalar_flag():
    assert parse_config(["global", "--c", "-9/10"]).c == "-9/10"
    assert parse_config(["deformation", "--c-prime", "-1/2"]).c_prime == "-1/2"


def test_deterministic_json(capsys):
    _, a = run(capsys, "transform", "--c", "1/4", "--seed", "7")
    _, b = run(capsys, "transform", "--c", "1/4", "--seed", "7")
    assert a == b


def test_byte_identical_across_processes(tmp_path):
    outs = []
    path = tmp_path / "report.json"
    for _ in range(2):
        subprocess.run([sys.executable, "-m", "necklace", "atlas", "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_deformation_command(capsys):
    code, rep = run_json(capsys, "deformation", "--c", "0", "--c-prime", "1/2")
    assert code == 0 and rep["result"]["multiple_of_pi"] == "1/2"


def test_verify_paper_symplectic_and_bruhat(capsys):
    code, rep = run_json(capsys, "verify-paper", "--c", "2")
    assert code == 0 and rep["result"]["final"]["dims"] == [1, 0, 1]
    code, rep = run_json(capsys, "verify-paper", "--c", "1")
    assert code == 0 and rep["result"]["final"]["status"] == "SKIPPED"
    assert any(c["status"] == "SKIPPED" and "Bruhat" in c["claim"] for c in rep["result"]["claims"])


def test_global_and_annulus(capsys):
    code, rep = run_json(capsys, "global", "--c", "-1/2")
    assert code == 0 and rep["result"]["dims"] == [1, 1, 2]
    code, rep = run_json(capsys, "annulus", "--modes", "2", "--degree", "4")
    assert code == 0 and rep["result"]["dims"] == [1, 2, 1]


def test_zero_mode_split_and_bracket(capsys):
    code, rep = run_json(capsys, "zero-mode-split", "--degree", "4")
    assert code == 0 and len(rep["result"]["subcomplexes"]) == 5
    code, rep = run_json(capsys, "bracket")
    assert code == 0 and rep["result"]["casimir u ubar + v vbar"]
