from __future__ import annotations

import io
import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from distcalc.cli import run
from distcalc.value import Value


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_integral_prints_exact_value():
    code, out, _ = call("integral", "--name", "I2", "--rules", "paper")
    assert code == 0
    assert out.strip() == "-1/32 · ω^-1"


@pytest.mark.parametrize(
    "name, rules, expected",
    [
        ("I1R", "paper", "-3/32 · ω^-1"),
        ("I2", "naive-pi", "-1/96 · ω^-1"),
        ("I2", "no-pi", "0"),
        ("I2", "vanishing-eps", "1/32 · ω^-1"),
        ("I", "naive-pi", "1/3"),
        ("Ian", "paper", "1/8 · ω^-1"),
        ("i10", "paper", "1/32 · ω^-1"),
    ],
)
def test_integral_values(name, rules, expected):
    code, out, _ = call("integral", "--name", name, "--rules", rules)
    assert (code, out.strip()) == (0, expected)


def test_integral_omega_override():
    code, out, _ = call("integral", "--name", "I2", "--omega", "1/2")
    assert out.strip() == "-1/16"


def test_strict_mode_flags_anomalous_integral():
    code, out, err = call("integral", "--name", "Ian", "--rules", "no-pi")
    assert code == 0
    assert out.strip() == "0"
    assert "cannot distinguish" in err


def test_integral_trace():
    code, out, _ = call("integral", "--name", "I1R", "--trace")
    lines = out.splitlines()
    assert lines[0] == "-3/32 · ω^-1"
    assert lines[1].startswith("trace (")
    assert any("[eom]" in ln for ln in lines)


def test_integral_json_round_trip():
    code, out, _ = call("integral", "--name", "I1R", "--json", "--trace")
    data = json.loads(out)
    assert Value.from_json(data["value"]) == Value.monomial(Fraction(-3, 32), omega=-1)
    assert Value.parse(data["text"]) == Value.from_json(data["value"])
    assert data["trace"] and set(data["trace"][0]) == {"rule", "before", "after"}


def test_verify_first_order():
    code, out, _ = call("verify", "--order", "1")
    assert code == 0
    assert out.rstrip().endswith("PASS")


def test_verify_second_order_json():
    code, out, _ = call("verify", "--order", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["pass"] is True
    assert Value.parse(data["residual"]).is_zero()


def test_verify_failure_prints_residual():
    code, out, _ = call("verify", "--order", "2", "--rules", "vanishing-eps")
    assert code == 1
    assert "FAIL: residual -1/4 · ω^-1" in out


def test_verify_substitutions():
    code, out, _ = call("verify", "--order", "2", "--omega", "2", "--a=-3/7")
    assert code == 0
    assert "a-dependent total: False" in out
    assert "ω" not in out.split("total:")[1].splitlines()[0]


def test_diagram_catalog_schema():
    code, out, _ = call("diagrams", "--order", "2", "--json")
    rows = json.loads(out)
    assert len(rows) == 18
    for r in rows:
        assert {"order", "class", "multiplicity", "coupling", "integrand", "paper_label"} <= set(r)
    assert rows[0]["paper_label"] == "f2.1"


def test_compare_rules_table():
    code, out, _ = call("compare-rules")
    assert code == 0
    rows = {ln.split()[0]: ln.split() for ln in out.splitlines()[1:]}
    assert rows["paper"][1] == "0" and rows["paper"][-1] == "pass"
    assert rows["naive-pi"][1] == "1/3" and rows["naive-pi"][-1] == "fail"
    assert rows["no-pi"][1] == "1/4" and rows["no-pi"][-1] == "pass"
    assert rows["vanishing-eps"][1] == "0" and rows["vanishing-eps"][-1] == "fail"


def test_compare_rules_json():
    code, out, _ = call("compare-rules", "--json")
    data = json.loads(out)
    assert [(r["rules"], r["pass"]) for r in data] == [
        ("paper", True), ("naive-pi", False), ("no-pi", True), ("vanishing-eps", False)
    ]


def test_oracle_subcommand():
    code, out, _ = call("oracle", "--omega", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["pass"]
    assert all(e["abs_error"] < 1e-8 for e in data["entries"])


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--order", "2", "--bogus"],
        ["frobnicate"],
        ["integral", "--name", "nope"],
        ["verify", "--order", "3"],
        ["oracle", "--omega", "-1"],
        ["oracle", "--omega", "x/y"],
        ["diagrams", "--order", "3"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, _ = call(*argv)
    assert code == 2


def test_depth_guard_env(monkeypatch):
    monkeypatch.setenv("DISTCALC_MAX_DEPTH", "2")
    code, _, err = call("verify", "--order", "2")
    assert code == 1
    assert "NonterminationError" in err and "diagram f" in err


def test_module_entry_point():
    env = dict(os.environ, PYTHONIOENCODING="utf-8")
    proc = subprocess.run(
        [sys.executable, "-m", "distcalc", "integral", "--name", "I2", "--rules", "paper"],
        capture_output=True, text=True, env=env, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "-1/32 · ω^-1"
    proc = subprocess.run([sys.executable, "-m", "distcalc", "--nope"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
    assert "usage" in proc.stderr
