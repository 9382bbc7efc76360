import json
from importlib import resources

import jsonschema
import pytest

from stairline.cli import main


@pytest.fixture(scope="module")
def schema():
    text = resources.files("stairline").joinpath("runrecord.schema.json").read_text()
    return json.loads(text)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def test_types(capsys):
    code, out, _ = run(capsys, "types", "--dim", "3")
    assert code == 0 and out.split() == ["{}", "{2}"]
    _, out, _ = run(capsys, "types", "--dim", "4", "--json")
    assert len(json.loads(out)) == 4
    _, out, _ = run(capsys, "types", "--dim", "2", "--json")
    assert json.loads(out) == ["{}"]


def test_types_usage_error(capsys):
    code, _, err = run(capsys, "types", "--dim", "1")
    assert code == 1 and "error" in err


def test_argparse_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["types"])
    assert exc.value.code == 1


def test_eval_grid(capsys, schema):
    code, out, _ = run(capsys, "eval", "--family", "grid", "--dim", "3",
                       "--q", "1,1,0.8", "--p", "0.5,0.5,0")
    (rec,) = records(out)
    assert code == 0 and rec["value"] == pytest.approx(0.04, abs=1e-15)
    jsonschema.validate(rec, schema)


def test_eval_exact_input_gives_exact_output(capsys, schema):
    _, out, _ = run(capsys, "eval", "--family", "grid", "--dim", "3",
                    "--q", "1,1,4/5", "--p", "1/2,1/2,0")
    (rec,) = records(out)
    assert rec["exact"] == "1/25"
    jsonschema.validate(rec, schema)


def test_eval_theorem2(capsys, schema):
    _, out, _ = run(capsys, "eval", "--family", "diag", "--dim", "3", "--theorem2")
    (rec,) = records(out)
    assert rec["exact"] == "1/25" and rec["value"] == 0.04
    jsonschema.validate(rec, schema)


def test_eval_condition_violation(capsys):
    code, _, err = run(capsys, "eval", "--family", "diag", "--dim", "3",
                       "--q", "1,0.5,0.6", "--p", "0.2,0.7,0.8")
    assert code == 1 and "p_i <= q_i" in err


def test_eval_wrong_arity(capsys):
    code, _, err = run(capsys, "eval", "--family", "grid", "--dim", "3", "--q", "1,1", "--p", "0,0,0")
    assert code == 1 and "expected 3" in err


def test_maximize_grid_d4(capsys, schema, tmp_path):
    out_file = tmp_path / "d4.jsonl"
    code, out, err = run(capsys, "maximize", "--family", "grid", "--dim", "4",
                         "--method", "de", "--seed", "1", "--out", str(out_file))
    recs = records(out)
    assert code == 0 and len(recs) == 4
    assert max(r["value"] for r in recs) == pytest.approx(0.00457936, abs=1e-6)
    assert records(out_file.read_text()) == recs
    for r in recs:
        jsonschema.validate(r, schema)
    assert "overall maximum" in err


def test_maximize_diag3(capsys, schema):
    code, out, _ = run(capsys, "maximize", "--family", "diag3", "--method", "de", "--seed", "1")
    recs = records(out)
    assert code == 0 and len(recs) == 15
    assert max(r["value"] for r in recs) == pytest.approx(0.04, abs=1e-9)
    for r in recs:
        jsonschema.validate(r, schema)


def test_maximize_fsl(capsys, schema):
    _, out, _ = run(capsys, "maximize", "--family", "fsl", "--dim", "2")
    (rec,) = records(out)
    assert rec["value"] == pytest.approx(1 / 27, abs=1e-9)
    jsonschema.validate(rec, schema)


def test_maximize_single_type_and_objective(capsys):
    _, out, _ = run(capsys, "maximize", "--family", "grid", "--dim", "3", "--type", "{2}")
    (rec,) = records(out)
    assert rec["type"] == "{2}" and rec["value"] == pytest.approx(0.04, abs=1e-8)
    _, out, _ = run(capsys, "maximize", "--family", "diag3", "--type", "F9")
    (rec,) = records(out)
    assert rec["type"] == "F9" and rec["value"] == pytest.approx(1 / 27, abs=1e-9)


def test_maximize_is_reproducible(capsys):
    args = ("maximize", "--family", "grid", "--dim", "3", "--seed", "5", "--budget", "20000")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args, "--threads", "3")
    strip = [{k: v for k, v in r.items() if k != "wall_ms"} for r in records(a)]
    assert strip == [{k: v for k, v in r.items() if k != "wall_ms"} for r in records(b)]


def test_maximize_budget_exit_code(capsys):
    code, _, err = run(capsys, "maximize", "--family", "grid", "--dim", "4", "--budget", "10")
    assert code == 3 and "budget" in err


def test_maximize_high_dim_needs_flag(capsys):
    code, _, _ = run(capsys, "maximize", "--family", "grid", "--dim", "7")
    assert code == 1


def test_values_round_trip(capsys):
    _, out, _ = run(capsys, "maximize", "--family", "grid", "--dim", "3", "--budget", "5000")
    for line in out.splitlines():
        v = json.loads(line)["value"]
        assert float(repr(v)) == v
        assert json.loads(json.dumps(v)) == v


def test_verify_mc(capsys):
    code, out, _ = run(capsys, "verify", "--mode", "mc", "--dim", "3", "--samples", "1000000")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and abs(rep["estimate"] - 0.24) <= 4 * rep["std_error"]


def test_verify_mc_diag(capsys):
    code, out, _ = run(capsys, "verify", "--mode", "mc", "--family", "diag", "--dim", "4",
                       "--samples", "200000")
    rep = json.loads(out)
    assert code == 0 and rep["exact"] == pytest.approx(1 / 9)


def test_verify_census_golden(capsys):
    code, out, _ = run(capsys, "verify", "--mode", "census", "--dim", "2", "--size", "3")
    rep = json.loads(out)
    assert code == 0 and rep["golden"] == "20/36" and rep["stabbed"] == 20


def test_verify_transference(capsys):
    code, out, _ = run(capsys, "verify", "--mode", "transference", "--dim", "3", "--size", "4",
                       "--trials", "10000")
    rep = json.loads(out)
    assert code == 0 and rep["mismatches"] == 0


def test_verify_failure_exit_code(capsys):
    # at m = 3 this segment's census is far from its limiting fraction
    code, out, _ = run(capsys, "verify", "--mode", "census", "--dim", "3", "--size", "3",
                       "--q", "0.1,0.1,0.9", "--p", "0.9,0.9,0.1")
    rep = json.loads(out)
    assert code == 2 and not rep["passed"] and rep["stabbed"] == 772


def test_report_subset(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--out", str(tmp_path), "--max-dim", "3",
                       "--criteria", "1,2,5,6")
    assert code == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    status = {c["number"]: c["status"] for c in summary["criteria"]}
    assert status == {1: "pass", 2: "skipped", 5: "pass", 6: "pass"}
    assert "c_{3,1} <= 1/25 (stretched diagonal)" in summary["bounds"]
    rows = (tmp_path / "diag_d3.csv").read_text().splitlines()
    assert len(rows) == 16
    assert sum(abs(float(r.split(",")[-2]) - 0.04) < 1e-9 for r in rows[1:]) == 3
    assert (tmp_path / "grid_d3.csv").exists()
    assert "[PASS] criterion 1" in out
