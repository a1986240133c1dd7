import json

import pytest

from heightrel.cli import run

QI_CURVE = {
    "field": {"kind": "Qi"},
    "curve": {"a4": "-5"},
    "points": [{"x": ["-1", "0"], "y": ["2", "0"]}, {"x": ["2", "1"], "y": ["1", "3"]}],
    "endos": [{
        "x_num": [{"coeff": "-1", "x": 1}], "x_den": [{"coeff": "1"}],
        "y_num": [{"coeff": ["0", "1"], "y": 1}], "y_den": [{"coeff": "1"}],
        "degree": 1, "adjoint": "self^3",
    }],
}


def invoke(tmp_path, capsys, command, doc=None, *flags):
    argv = [command]
    if doc is not None:
        path = tmp_path / "in.json"
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        argv.append(str(path))
    argv.extend(flags)
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_bound(tmp_path, capsys):
    code, rep = invoke(tmp_path, capsys, "bound",
                       {"r": 2, "algebra": {"quadratic": {"D": 5, "involution": "trivial"}}})
    assert code == 0
    assert list(rep) == ["command", "inputs_digest", "results", "versions", "timings"]
    res = rep["results"]
    assert (res["trivial_bound"], res["theorem1_bound"], res["albert"]) == (3, 2, "I")


def test_shape(tmp_path, capsys):
    code, rep = invoke(tmp_path, capsys, "shape", {"n": 1, "algebra": {"quadratic": {"D": -1}}})
    assert code == 0
    assert rep["results"]["generic"] == [["t1", "0"], ["0", "t1"]]
    code, rep = invoke(tmp_path, capsys, "shape",
                       {"n": 1, "algebra": {"quadratic": {"D": 5, "involution": "trivial"}}})
    assert rep["results"]["entry_relations"] == [[5, 0, -1]]


def test_transform(tmp_path, capsys):
    alg = {"quadratic": {"D": 5, "involution": "trivial"}}
    for phi in ("1+ω", ["1", "1"], "1 + w"):
        code, rep = invoke(tmp_path, capsys, "transform", {"algebra": alg, "phi": phi})
        assert code == 0
        assert rep["results"]["matrix"] == [["6", "2"], ["10", "6"]]
        assert rep["results"]["det_ok"]


def test_raw_algebra(tmp_path, capsys):
    raw = {"dim": 2, "structure_constants": [[[1, 0], [0, 1]], [[0, 1], [2, 0]]], "unit": [1, 0],
           "involution": [[1, 0], [0, 1]]}
    code, rep = invoke(tmp_path, capsys, "bound", {"r": 4, "algebra": raw})
    assert code == 0 and rep["results"]["theorem1_bound"] == 6


def test_heights_and_adjoint(tmp_path, capsys):
    code, rep = invoke(tmp_path, capsys, "gram", QI_CURVE)
    assert code == 0
    assert len(rep["results"]["values"]) == 3
    code, rep = invoke(tmp_path, capsys, "verify-adjoint", QI_CURVE)
    assert code == 0 and rep["results"]["ok"]
    code, rep = invoke(tmp_path, capsys, "height", QI_CURVE, "--tol", "1e-8", "--cap", "4")
    assert code == 0
    assert not rep["results"]["heights"][0]["converged"]


def test_report_determinism(tmp_path, capsys):
    doc = {"n": 2, "algebra": {"quaternion": {"a": -1, "b": -1}}}
    _, a = invoke(tmp_path, capsys, "shape", doc)
    _, b = invoke(tmp_path, capsys, "shape", doc)
    a.pop("timings"), b.pop("timings")
    assert a == b


def test_relations(tmp_path, capsys):
    code, rep = invoke(tmp_path, capsys, "relations", {"values": ["1.0", "2.0", "3.0"]}, "--height-bound", "10")
    assert code == 0 and rep["results"]["estimated_span_dim"] == 1
    code, rep = invoke(tmp_path, capsys, "relations",
                       {"values": ["0.25", "1.25"], "predicted": {"relations": [[5, -1]]}})
    assert rep["results"]["verdict"] == "consistent"


@pytest.mark.parametrize("command,doc,path", [
    ("bound", {"r": 2, "algebra": {"quadratic": {"D": 5, "bogus": 1}}}, "$.algebra.quadratic"),
    ("bound", {"r": 2, "algebra": {"quadratic": {"D": 5}}, "extra": 0}, "$"),
    ("bound", {"r": "2", "algebra": {"quadratic": {"D": 5}}}, "$.r"),
    ("bound", {"r": 3, "algebra": {"quadratic": {"D": 5}}}, "$.r"),
    ("bound", {"r": 2, "algebra": {"quadratic": {"D": 4}}}, "$.algebra"),
    ("shape", {"n": 0, "algebra": {"quadratic": {"D": 5}}}, "$.n"),
    ("transform", {"algebra": {"quadratic": {"D": 5}}, "phi": "1+q"}, "$.phi"),
    ("transform", {"algebra": {"quadratic": {"D": 5}}, "phi": ["1", "2", "3"]}, "$.phi"),
    ("height", {**QI_CURVE, "points": [{"x": ["1", "0"], "y": ["1", "0"]}]}, "$.points[0]"),
    ("height", {**QI_CURVE, "points": [{"x": 1.5, "y": "2"}]}, "$.points[0].x"),
    ("height", {**QI_CURVE, "field": {"kind": "imaginary_quadratic", "d": -5}}, "$.field.d"),
    ("verify-adjoint", {**QI_CURVE, "endos": [{**QI_CURVE["endos"][0], "adjoint": "other"}]},
     "$.endos[0].adjoint"),
    ("relations", {"values": ["1.0", "abc"]}, "$.values"),
])
def test_malformed_inputs_exit_2(tmp_path, capsys, command, doc, path):
    code, err = invoke(tmp_path, capsys, command, doc)
    assert code == 2
    assert err["error"] == "invalid_input"
    assert err["path"] == path


def test_invalid_json_exit_2(tmp_path, capsys):
    code, err = invoke(tmp_path, capsys, "bound", "{not json")
    assert code == 2 and err["path"] == "$"


def test_demos(tmp_path, capsys):
    code, rep = invoke(tmp_path, capsys, "demo", None, "rm", "--D", "13", "--n", "2")
    assert code == 0 and rep["results"]["verdict"] == "consistent"
    code, err = invoke(tmp_path, capsys, "demo", None, "rm", "--corrupt")
    assert code == 1 and err["results"]["verdict"] == "inconsistent"
    code, err = invoke(tmp_path, capsys, "demo", None, "cm", "--tol", "1e-8", "--cap", "6")
    assert code == 1 and err["results"]["verdict"] == "undetermined"
    code, rep = invoke(tmp_path, capsys, "demo", None, "cm")
    assert code == 0 and rep["results"]["order_four"]


def test_output_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _ = invoke(tmp_path, capsys, "shape", {"n": 1, "algebra": {"rational": {}}}, "-o", str(out))
    assert code == 0
    assert json.loads(out.read_text())["results"]["param_dim"] == 1
