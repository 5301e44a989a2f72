import json
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from gaudin.errors import SchemaError
from gaudin.harness_cli import (REPORT_SCHEMA, default_j_max, emit_report,
                                load_problem, main, run_pipeline)
from gaudin.master import GaudinProblem, SolverConfig

ANCHOR_JSON = {
    "N": 1,
    "partitions": [[1, 0], [1, 0]],
    "l": [1],
    "z": ["0", "1"],
    "solver": {"seed": 1},
}


def write_problem(tmp_path, payload, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_load_problem_parses_site_forms():
    prob, config, options = load_problem({
        "N": 1, "partitions": [[1, 0], [1, 0]], "l": [1],
        "z": ["1/2", 3], "solver": {"seed": 9}, "j_max": 6,
    })
    assert prob.z == (Fraction(1, 2), Fraction(3))
    assert prob.mode == "exact"
    assert config.seed == 9
    assert options == {"j_max": 6}
    prob2, _, _ = load_problem({
        "N": 1, "partitions": [[1, 0], [1, 0]], "l": [1],
        "z": [[0.1, 0.2], 1.5],
    })
    assert prob2.mode == "numeric"
    assert prob2.z[0] == complex(0.1, 0.2)


def test_load_problem_rejects_malformed():
    with pytest.raises(SchemaError):
        load_problem({"N": 1, "partitions": [[1, 0]], "l": [1]})  # no z
    with pytest.raises(SchemaError):
        load_problem({"N": 1, "partitions": [[1, 0], [1, 0]], "l": [1],
                      "z": ["0", "1"], "surprise": True})
    with pytest.raises(SchemaError):
        load_problem({"N": 1, "partitions": [[1, 0], [1, 0]], "l": [1],
                      "z": [True, "1"]})
    with pytest.raises(SchemaError):   # repeated sites
        load_problem({"N": 1, "partitions": [[1, 0], [1, 0]], "l": [1],
                      "z": ["1", "1"]})
    with pytest.raises(SchemaError):   # not a partition
        load_problem({"N": 1, "partitions": [[0, 1], [1, 0]], "l": [1],
                      "z": ["0", "1"]})
    with pytest.raises(SchemaError):
        load_problem("/nonexistent/path.json")


def test_default_j_max():
    prob, _, _ = load_problem(dict(ANCHOR_JSON))
    assert default_j_max(prob) == 4


def test_run_pipeline_report_is_valid_and_passes():
    prob, config, _ = load_problem(dict(ANCHOR_JSON))
    report = run_pipeline(prob, config)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["format"] == "gaudin-report/1"
    assert report["summary"]["all_pass"]
    assert report["summary"]["failed"] == 0
    names = [c["name"] for c in report["checks"]]
    for expected in ("algebra_commutativity", "first_coefficient",
                     "orbit_count", "orbit0.eigenvalue_equations",
                     "orbit0.norm_formula", "orbit0.wronskian_identities",
                     "orbit0.schubert_incidence", "gram_rank",
                     "completeness"):
        assert expected in names
    assert len(report["orbits"]) == 1
    assert report["derived"]["singular_dimension"] == 1
    assert report["derived"]["exponents"] == [2, 1]


def test_run_pipeline_deterministic_bytes():
    prob, config, _ = load_problem(dict(ANCHOR_JSON))
    r1 = run_pipeline(prob, config)
    prob2, config2, _ = load_problem(dict(ANCHOR_JSON))
    r2 = run_pipeline(prob2, config2)
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_solve_stage_reports_orbits_only():
    prob, config, _ = load_problem(dict(ANCHOR_JSON))
    report = run_pipeline(prob, config, stage="solve")
    assert [c["name"] for c in report["checks"]] == ["orbit_count"]
    assert report["summary"]["all_pass"]


def test_emit_report_text(capsys):
    prob, config, _ = load_problem(dict(ANCHOR_JSON))
    report = run_pipeline(prob, config)
    emit_report(report, "text")
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0].startswith("# gaudin-report/1 backend=")
    assert any(line.startswith("PASS") for line in lines)
    assert lines[-1].startswith("# ") and "passed" in lines[-1]


def test_main_selftest_json(capsys):
    rc = main(["selftest", "--format", "json"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["summary"]["all_pass"]


def test_main_verify_and_out_file(tmp_path, capsys):
    path = write_problem(tmp_path, ANCHOR_JSON)
    out = tmp_path / "report.json"
    rc = main(["verify", "--problem", path, "--out", str(out)])
    assert rc == 0
    capsys.readouterr()
    saved = json.loads(out.read_text())
    jsonschema.validate(saved, REPORT_SCHEMA)
    assert saved["summary"]["all_pass"]


def test_main_solve_failure_exit_code(tmp_path, capsys):
    # two variables make the cleared critical system genuinely nonlinear,
    # so a single Newton iteration cannot reach the residual tolerance
    payload = {"N": 1, "partitions": [[2, 0], [2, 0]], "l": [2],
               "z": ["0", "1"], "solver": {"seed": 1, "max_iter": 1}}
    path = write_problem(tmp_path, payload)
    rc = main(["solve", "--problem", path])
    capsys.readouterr()
    assert rc == 1


def test_main_malformed_exit_code(tmp_path, capsys):
    path = write_problem(tmp_path, {"N": 1, "partitions": [[1, 0], [1, 0]],
                                    "l": [1], "z": ["1", "1"]})
    rc = main(["verify", "--problem", path])
    err = capsys.readouterr().err
    assert rc == 2
    assert "input error" in err


def test_main_spectrum(tmp_path, capsys):
    path = write_problem(tmp_path, ANCHOR_JSON)
    rc = main(["spectrum", "--problem", path])
    out = capsys.readouterr().out
    assert rc == 0
    assert "orbit 0" in out
    assert "coefficient 1:" in out
    assert "coefficient 2:" in out


def test_main_weightfn(tmp_path, capsys):
    path = write_problem(tmp_path, ANCHOR_JSON)
    rc = main(["weightfn", "--problem", path])
    out = capsys.readouterr().out
    assert rc == 0
    assert "summand count: 2" in out
    assert "orbit 0: 2 nonzero coordinates" in out


def test_main_seed_override(tmp_path, capsys):
    path = write_problem(tmp_path, ANCHOR_JSON)
    rc = main(["solve", "--problem", path, "--seed", "77", "--format",
               "json"])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert report["seed"] == 77


def test_console_script_selftest():
    proc = subprocess.run(["gaudin", "selftest", "--format", "json"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["summary"]["all_pass"]


def test_rank2_pipeline_passes():
    prob = GaudinProblem(2, [[1, 0, 0], [1, 1, 0]], [1, 1],
                         [Fraction(0), Fraction(1)])
    report = run_pipeline(prob, SolverConfig(seed=3))
    assert report["summary"]["all_pass"]
    assert report["derived"]["singular_dimension"] == 1
    spec = report["spectra"][0]
    assert spec["exact_point"]
    # first coefficient expands to -(|lam_1| + |lam_2|)/u + O(1/u^2)
    lead = spec["eigenvalues"]["1"][0]
    assert lead == "-3"
