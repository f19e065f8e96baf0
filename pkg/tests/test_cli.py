import csv
import json

import numpy as np
import pytest

from conftest import load_fixture
from lamopt.cli import dumps, main, run_optimize
from lamopt.outer import design_margins
from lamopt.problem import DesignProblem


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


# -- params ------------------------------------------------------------------

def test_params_all_zero(tmp_path, capsys):
    code, out, _ = run(capsys, "params", write(tmp_path, "s.json", {"plies": [0, 0, 0]}))
    doc = json.loads(out)
    assert code == 0
    assert doc["xi_a"] == [1.0, 1.0, 0.0, 0.0]
    assert doc["xi_d"]["exact"] == [1.0, 1.0, 0.0, 0.0]


def test_params_cross_ply(tmp_path, capsys):
    code, out, _ = run(capsys, "params", write(tmp_path, "s.json", {"plies": [0, 90]}))
    doc = json.loads(out)
    assert doc["xi_d"]["exact"] == pytest.approx([-0.75, 1.0, 0.0, 0.0], abs=1e-15)
    assert doc["xi_d"]["midpoint"] == pytest.approx([-0.75, 0.9375, 0.0, 0.0], abs=1e-15)


def test_params_with_material(tmp_path, capsys, compression_doc):
    stack = {"plies": [45, -45, 0], "material": compression_doc["material"]}
    code, out, _ = run(capsys, "params", write(tmp_path, "s.json", stack), "--mode", "exact")
    doc = json.loads(out)
    assert code == 0 and doc["mode"] == "exact"
    assert np.array(doc["D"]).shape == (3, 3)
    assert np.allclose(doc["A"], np.array(doc["A"]).T)


@pytest.mark.parametrize("text, where", [("", ":1:1:"), ('{"plies": [0,\n ]}', ":2:2:")])
def test_params_malformed(tmp_path, capsys, text, where):
    code, _, err = run(capsys, "params", write(tmp_path, "bad.json", text))
    assert code == 2 and where in err


def test_params_schema_error(tmp_path, capsys):
    code, _, err = run(capsys, "params", write(tmp_path, "s.json", {"plies": []}))
    assert code == 2 and "plies" in err


# -- region ------------------------------------------------------------------

def test_region_single_angle(capsys):
    code, out, _ = run(capsys, "region", "--counts", "3,0,0,0")
    doc = json.loads(out)
    assert code == 0 and doc["affine_dim"] == 0 and len(doc["vertices"]) == 1
    assert doc["vertex_sequences"] == [[0, 0, 0]]


def test_region_segment(capsys):
    code, out, _ = run(capsys, "region", "--counts", "1,1", "--angles", "0,90")
    doc = json.loads(out)
    assert doc["affine_dim"] == 1 and len(doc["vertices"]) == 2
    assert sorted(map(tuple, doc["vertex_sequences"])) == [(0, 90), (90, 0)]


def test_region_csv(tmp_path, capsys):
    path = tmp_path / "v.csv"
    code, out, _ = run(capsys, "region", "--counts", "2,1,1,0", "--csv", path)
    doc = json.loads(out)
    rows = list(csv.reader(path.open()))
    assert code == 0 and 1 <= len(doc["vertices"]) <= 6
    assert rows[0][:4] == ["xi1", "xi2", "xi3", "xi4"]
    assert np.array([r[:4] for r in rows[1:]], float).tolist() == doc["vertices"]


def test_region_rejects_zero_plies(capsys):
    code, _, err = run(capsys, "region", "--counts", "0,0,0,0")
    assert code == 2 and err


# -- optimize ----------------------------------------------------------------

@pytest.mark.parametrize("name, total", [("compression.json", 4), ("combined.json", 6)])
def test_optimize_fixtures(tmp_path, capsys, name, total):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "optimize", write(tmp_path, name, load_fixture(name)), "-o", out)
    doc = json.loads(out.read_text())
    assert code == 0 and doc["status"] == "optimal"
    assert doc["total_plies"] == total
    assert doc["full_laminate"] == doc["stacking_sequence"][::-1] + doc["stacking_sequence"]
    assert "timings" not in doc
    assert min(doc["outer_margins"].values()) >= -1e-9


def test_optimize_infeasible(tmp_path, capsys, compression_doc):
    doc = dict(compression_doc, solver={"max_total_plies": 1})
    code, out, _ = run(capsys, "optimize", write(tmp_path, "p.json", doc))
    assert code == 3 and json.loads(out)["status"] == "infeasible-up-to-cap"


def test_optimize_rule_infeasible(tmp_path, capsys, compression_doc):
    doc = dict(compression_doc, angles=[0, 90],
               outer_rules={"min_pct": [1.0, 0.0]},
               inner_rules={"outer_ply_angles": [90]})
    code, out, _ = run(capsys, "optimize", write(tmp_path, "p.json", doc))
    res = json.loads(out)
    assert code == 4 and res["status"] == "rule-infeasible"
    assert res["inner"]["violations"][0]["rule"]


@pytest.mark.parametrize("patch", [
    {"outer_rules": {"min_pct": 0.3}},               # 4 x 0.3 > 1
    {"schema_version": 2},
    {"material": {"E1": 1.0}},
    {"angles": [0, 0]},
    {"inner_rules": {"outer_ply_angles": [30]}},
])
def test_optimize_input_errors(tmp_path, capsys, compression_doc, patch):
    code, _, err = run(capsys, "optimize", write(tmp_path, "p.json", dict(compression_doc, **patch)))
    assert code == 2 and err.startswith("lamopt: error:")


def test_optimize_timings_flag(tmp_path, capsys, compression_doc):
    code, out, _ = run(capsys, "optimize", write(tmp_path, "p.json", compression_doc), "--timings")
    assert set(json.loads(out)["timings"]) == {"outer_s", "inner_s"}


def test_round_trip_through_params(tmp_path, capsys):
    data = load_fixture("combined.json")
    res, _ = run_optimize(data)
    stack = {"plies": res["stacking_sequence"], "angles": res["angles"],
             "material": data["material"]}
    _, out, _ = run(capsys, "params", write(tmp_path, "s.json", stack))
    params = json.loads(out)
    problem = DesignProblem.from_dict(data)
    assert params["xi_d"]["midpoint"] == pytest.approx(res["inner"]["xi_d"], abs=1e-15)
    margins = design_margins(res["counts"], np.array(params["xi_d"]["midpoint"]), problem)
    for k, v in res["design_margins"].items():
        assert margins[k] == pytest.approx(v, abs=1e-9)


def test_thread_count_does_not_change_output(tmp_path, capsys, monkeypatch):
    p = write(tmp_path, "p.json", load_fixture("biaxial.json"))
    outs = []
    for t in ("1", "8"):
        run(capsys, "optimize", p, "--threads", t, "-o", tmp_path / f"r{t}.json")
        outs.append((tmp_path / f"r{t}.json").read_bytes())
    monkeypatch.setenv("LAMOPT_THREADS", "4")
    from lamopt import cli
    args = cli.build_parser().parse_args(["optimize", str(p)])
    assert args.threads == 4
    args.output = str(tmp_path / "r4.json")
    cli.cmd_optimize(args)
    outs.append((tmp_path / "r4.json").read_bytes())
    assert outs[0] == outs[1] == outs[2]


# -- verify ------------------------------------------------------------------

def test_verify_2222(capsys):
    code, out, _ = run(capsys, "verify", "--counts", "2,2,2,2", "--samples", "50")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert [r["n_sequences"] for r in doc["reports"]] == [2520, 2520]


def test_verify_single_ply(capsys):
    code, out, _ = run(capsys, "verify", "--counts", "1,0,0,0", "--mode", "exact")
    doc = json.loads(out)
    assert code == 0 and doc["reports"][0]["n_vertices"] == 1


def test_verify_guard(capsys):
    code, _, err = run(capsys, "verify", "--counts", "8,8,8,8")
    assert code == 2 and "sequences" in err


# -- output format -----------------------------------------------------------

def test_dumps_is_deterministic():
    doc = {"b": [0.1, 1e-20, np.float64(2.0)], "a": {"x": np.arange(2)}, "n": None}
    assert dumps(doc) == dumps(json.loads(dumps(doc)))
    assert json.loads(dumps(doc))["b"][0] == 0.1
    assert list(json.loads(dumps(doc))) == ["b", "a", "n"]
