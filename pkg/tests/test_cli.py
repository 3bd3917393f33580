from __future__ import annotations

import json
from pathlib import Path

import pytest

from polyhardy import Grade, Scenario, dump_scenario, load_scenario
from polyhardy.cli import build_parser, main, run_pipeline
from polyhardy.reporting import canonical_json, strip_timing

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"


def run_cli(argv, capsys):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_exit_zero_and_report_shape(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, _, _ = run_cli(
        ["run", SCENARIOS / "z.json", "--output", out_path, "--quiet"], capsys
    )
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["label"] == "z"
    assert report["verdicts"]["all"] is True
    assert set(report["steps"]) == {"orbit", "wandering", "extract", "verify", "classify"}
    assert report["steps"]["orbit"]["dim"] == 30
    assert report["steps"]["wandering"]["dim"] == 6
    assert "seconds" in report["timing"]


def test_run_report_carries_multiplier_coefficients(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, _, _ = run_cli(
        ["run", SCENARIOS / "z-minus-z1.json", "--output", out_path, "--quiet"], capsys
    )
    assert code == 0
    report = json.loads(out_path.read_text())
    phi0 = report["steps"]["extract"]["phi"][0]
    first_order = phi0["coeffs"][1]
    assert first_order["shape"] == [5, 5]
    re, im = first_order["rows"][0][0]
    assert abs(complex(re, im) + 0.5) < 1e-10


def test_golden_report_bytes():
    report = run_pipeline(load_scenario(SCENARIOS / "z-minus-z1.json"))
    text = canonical_json(strip_timing(report))
    golden = (GOLDEN / "z-minus-z1-report.json").read_text()
    assert text == golden


def test_report_deterministic():
    scenario = load_scenario(SCENARIOS / "z-minus-z1.json")
    first = canonical_json(strip_timing(run_pipeline(scenario)))
    second = canonical_json(strip_timing(run_pipeline(scenario)))
    assert first == second


def test_missing_file_exit_one(capsys):
    code, _, err = run_cli(["run", "no-such-scenario.json"], capsys)
    assert code == 1
    assert "error:" in err


def test_invalid_json_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, _, err = run_cli(["run", bad], capsys)
    assert code == 1
    assert "error:" in err


def test_degenerate_grade_exit_one(capsys, tmp_path):
    sc = Scenario(label="flat", grade=Grade(1, 1, 4, 1), generators=("z",))
    path = tmp_path / "flat.json"
    dump_scenario(sc, path)
    code, _, err = run_cli(["run", path], capsys)
    assert code == 1
    assert "trusted range" in err


def test_capacity_guard_exit_one(capsys):
    code, _, err = run_cli(["run", SCENARIOS / "z.json", "--max-dim", "50"], capsys)
    assert code == 1
    assert "limit" in err


def test_pipeline_dependency_exit_one(capsys, tmp_path):
    sc = Scenario(
        label="orphan",
        grade=Grade(1, 5, 5, 1),
        generators=("z",),
        pipeline=("wandering",),
    )
    path = tmp_path / "orphan.json"
    dump_scenario(sc, path)
    code, _, err = run_cli(["run", path], capsys)
    assert code == 1
    assert "requires" in err


def test_compare_self_coincides(capsys):
    code, out, _ = run_cli(
        [
            "compare",
            SCENARIOS / "z-minus-z1.json",
            SCENARIOS / "z-minus-z1.json",
            "--quiet",
        ],
        capsys,
    )
    assert code == 0
    result = json.loads(out)
    assert result["certificate"]["verdict"] == "coincide"
    assert result["certificate"]["unitarity_residual"] < 1e-8


def test_compare_distinct_exit_two(capsys):
    code, out, _ = run_cli(
        ["compare", SCENARIOS / "z-minus-z1.json", SCENARIOS / "one.json", "--quiet"],
        capsys,
    )
    assert code == 2
    result = json.loads(out)
    assert result["certificate"]["verdict"] == "distinct"
    assert result["certified_dims"] == [4, 5]


def test_compare_indeterminate_exit_three(capsys):
    code, out, _ = run_cli(
        [
            "compare",
            SCENARIOS / "full-rank2.json",
            SCENARIOS / "full-rank2.json",
            "--quiet",
        ],
        capsys,
    )
    assert code == 3
    result = json.loads(out)
    assert result["certificate"]["verdict"] == "indeterminate"
    assert result["certificate"]["nullspace_dim"] > 8


def test_selftest_named_corpus(capsys):
    code, out, _ = run_cli(["selftest", "--random", "0"], capsys)
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.startswith(("PASS", "FAIL"))]
    assert len(lines) == 6
    assert all(ln.startswith("PASS") for ln in lines)
    assert "6/6 scenarios passed" in out


def test_selftest_quiet(capsys):
    code, out, _ = run_cli(["selftest", "--random", "0", "--quiet"], capsys)
    assert code == 0
    assert out == ""


def test_parser_rejects_unknown_command():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["frobnicate"])
