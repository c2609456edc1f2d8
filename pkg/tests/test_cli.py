import json
import subprocess
import sys

import pytest

from sbo_kit.cli import main
from sbo_kit.rational import LAMBDA
from sbo_kit.render import parse_operator
from sbo_kit.suites import ConfigError, SuiteConfig, cases, jobs_from_env, parse_range, run_suite


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


@pytest.mark.parametrize(
    "argv,expected",
    [
        (("print", "juhl", "--n", "3", "--l", "1"), "2 ∂_n"),
        (("print", "branson", "--n", "4", "--i", "1", "--l", "0"), "−1 · id"),
        (("print", "sbo", "--n", "2", "--i", "0", "--j", "0", "--l", "2"), "(λ² + (5/2)λ + 1) ∂_n² + ((1/2)λ + 1) Δ′"),
        (("vanish", "--lambda", "1", "--nu", "1", "--i", "1", "--j", "1", "--n", "3"), "vanishes: point (i,i)"),
        (("vanish", "--lambda", "0", "--nu", "0", "--i", "0", "--j", "0", "--n", "3"), "vanishes: L_even"),
        (("vanish", "--lambda", "3", "--nu", "4", "--i", "1", "--j", "1", "--n", "3"), "nonzero (off-parity)"),
        (("vanish", "--lambda", "2", "--nu", "2", "--i", "0", "--j", "0", "--n", "3"), "nonzero"),
        (("vanish", "--lambda", "-3/2", "--nu", "1/2", "--i", "1", "--n", "3"), "nonzero"),
    ],
)
def test_documented_outputs(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out == expected


def test_sbo_print_matches_scaled_juhl(capsys):
    # (ν/2)·((2λ − n + 3)∂_n² + Δ′) at n = 2, ν = λ + 2
    _, out, _ = run(capsys, "print", "sbo", "--n", "2", "--i", "0", "--j", "0", "--l", "2")
    _, ref, _ = run(capsys, "print", "juhl", "--n", "2", "--l", "2")
    assert parse_operator(out, 2) == parse_operator(ref, 2).scale((LAMBDA + 2) / 2)


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "main-theorem", "--n", "3", "--m", "0..2"),
        ("verify", "vanish", "--n", "3", "--grid", "-5..5"),
        ("verify", "weyl", "--n", "5", "--k", "6"),
    ],
)
def test_verify_examples_exit_zero(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0, out


def test_verify_failure_exit_one(capsys):
    code, out, _ = run(capsys, "verify", "components", "--n", "2", "--kappa", "1")
    assert code == 1 and "[FAIL]" in out
    code, _, _ = run(capsys, "verify", "components", "--n", "2", "--kappa", "1", "--kappa1-numerator", "8")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "bogus"),
        ("verify", "weyl", "--n", "0"),
        ("verify", "weyl", "--n", "a..b"),
        ("verify", "numeric", "--tol", "-1"),
        ("verify", "weyl", "--jobs", "0"),
        ("print", "nothing", "--n", "3"),
        ("print", "sbo", "--n", "3", "--i", "1", "--j", "2", "--l", "1"),
        ("print", "juhl", "--n", "3"),
        ("vanish", "--lambda", "x", "--nu", "0", "--n", "3"),
        ("eval-num", "--n", "2", "--lambda", "1", "--nu", "0"),
        ("eval-num", "--n", "2", "--i", "1", "--I", "3", "--lambda", "9", "--nu", "0"),
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_json_report_schema(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "gegenbauer", "--l", "0..2", "--n", "2", "--format", "json", "--out", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc == json.loads(path.read_text(encoding="utf-8"))
    assert doc["schema_version"] == "v1"
    for case in doc["cases"]:
        assert set(case) == {"suite", "case", "status", "lhs", "rhs", "millis"}
    # golden shape with timings dropped
    golden = [(c["suite"], c["case"], c["status"], c["lhs"], c["rhs"]) for c in doc["cases"]]
    assert golden[:2] == [
        ("gegenbauer", "l=0 lowering", "pass", "", ""),
        ("gegenbauer", "l=0 raising", "pass", "", ""),
    ]
    assert golden[-1] == ("gegenbauer", "juhl product form n=2 l=2", "pass", "", "")


def test_failure_json_carries_both_sides(capsys):
    code, out, _ = run(capsys, "verify", "components", "--n", "1", "--kappa", "1", "--format", "json")
    doc = json.loads(out)
    failed = [c for c in doc["cases"] if c["status"] == "fail"]
    assert code == 1 and failed and all(c["lhs"] and c["rhs"] for c in failed)


def test_print_formats(capsys):
    code, out, _ = run(capsys, "print", "kernel", "--n", "2", "--i", "1", "--j", "0", "--kappa", "1", "--format", "latex")
    assert code == 0 and r"\operatorname{sgn}" in out and "Γ" not in out
    code, out, _ = run(capsys, "print", "branson", "--n", "2", "--i", "1", "--l", "1", "--format", "json")
    assert json.loads(out)["target"] == "branson"
    code, out, _ = run(capsys, "print", "juhl", "--n", "3", "--l", "2", "--lambda", "1/2")
    assert out == "∂_n² + Δ′"


def test_eval_num(capsys):
    code, out, _ = run(capsys, "eval-num", "--n", "2", "--lambda", "6", "--nu", "0", "--x", "1,1")
    assert code == 0 and float(out) == pytest.approx(0.376126389031838)
    code, out, _ = run(capsys, "eval-num", "--n", "2", "--lambda", "9", "--nu", "1/2", "--format", "json")
    assert json.loads(out)["status"] == "converged"


def test_parse_range():
    assert parse_range("2..4", []) == [2, 3, 4]
    assert parse_range("-2..1", []) == [-2, -1, 0, 1]
    assert parse_range("1,3", []) == [1, 3]
    assert parse_range(None, [7]) == [7]
    with pytest.raises(ConfigError):
        parse_range("4..2", [])


def test_parallel_order_is_deterministic():
    cfg = SuiteConfig(n=[2, 3])
    serial = [(r.case, r.passed) for r in run_suite("vanish", cfg)]
    parallel = [(r.case, r.passed) for r in run_suite("vanish", SuiteConfig(n=[2, 3], jobs=3))]
    assert serial == parallel


def test_jobs_from_environment(monkeypatch):
    monkeypatch.setenv("SBO_KIT_JOBS", "3")
    assert jobs_from_env(None) == 3 and jobs_from_env(1) == 1
    monkeypatch.setenv("SBO_KIT_JOBS", "many")
    with pytest.raises(ConfigError):
        jobs_from_env(None)


def test_unknown_suite_rejected():
    with pytest.raises(ConfigError):
        cases("nope", SuiteConfig())


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sbo_kit.cli", "print", "juhl", "--n", "3", "--l", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "2 ∂_n"
