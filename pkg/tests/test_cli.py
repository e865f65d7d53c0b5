import io
import json

import pytest

from sectional.cli import run


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _run(argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def diag123(tmp_path):
    return _write(tmp_path, "d.json", {"dim": 3, "matrix": [[1, 0, 0], [0, 2, 0], [0, 0, 3]]})


def test_bounds(diag123):
    code, out, _ = _run(["bounds", "-i", diag123, "--samples", "500"])
    assert code == 0
    rep = json.loads(out)
    assert rep["result"]["m"] == 2.0 and rep["result"]["M"] == 6.0
    assert list(rep) == ["command", "config", "result", "provenance"]
    assert rep["config"]["input_path"] == diag123 and rep["config"]["seed"] == 0
    assert rep["provenance"]["oracle"] == pytest.approx([2.0, 6.0], abs=1e-6)


def test_demo_remark():
    code, out, _ = _run(["demo", "remark-2-4", "--samples", "1000"])
    assert code == 0
    res = json.loads(out)["result"]
    assert res["outer_bound"][1] == 2.0
    assert res["oracle_max"] < 2.0
    assert res["strictly_below_outer_max"] is True


def test_verify_nonsymmetric(tmp_path):
    path = _write(tmp_path, "bad.json", {"dim": 3, "matrix": [[1, 0, 0], [0, 2, 5], [0, 0, 3]]})
    code, out, err = _run(["verify", "-i", path])
    assert code == 1 and out == ""
    assert "(1, 2)" in err and "(2, 1)" in err


def test_verify_passes(diag123):
    code, out, _ = _run(["verify", "-i", diag123, "--samples", "500"])
    assert code == 0
    assert json.loads(out)["result"]["passed"] is True


def test_verify_sum(tmp_path):
    doc = {
        "dim": 3,
        "terms": [
            {"coefficient": 1, "form": [[1, 0, 0], [0, 1, 0], [0, 0, 0]]},
            {"coefficient": 1, "form": [[1, 0, 0], [0, 0, 0], [0, 0, 1]]},
        ],
    }
    code, out, _ = _run(["verify", "-i", _write(tmp_path, "s.json", doc), "--samples", "500"])
    assert code == 0
    res = json.loads(out)["result"]
    assert res["kind"] == "sum" and res["formula"] == [0.0, 2.0]


def test_verify_violation_exit_code(diag123, monkeypatch):
    # unrefined samples cannot reach the sharp extremes
    from sectional import cli
    from sectional.oracle import estimate_range

    monkeypatch.setattr(cli, "estimate_range", lambda t, **kw: estimate_range(t, **{**kw, "refinements": 0}))
    code, out, err = _run(["verify", "-i", diag123, "--samples", "3"])
    assert code == 2
    res = json.loads(out)["result"]
    assert res["passed"] is False and res["violations"]
    assert "verification failed" in err


def test_sum_bounds(tmp_path):
    doc = {"dim": 2, "terms": [{"coefficient": 4, "form": [[1, 0], [0, 1]]}, {"coefficient": 0, "form": [[1, 0], [0, 1]]}]}
    code, out, _ = _run(["sum-bounds", "-i", _write(tmp_path, "s.json", doc), "--samples", "50"])
    assert code == 0
    res = json.loads(out)["result"]
    assert res["m"] == pytest.approx(4.0) and res["M"] == pytest.approx(4.0)
    assert len(res["terms"]) == 1


@pytest.mark.parametrize("mode", ["paper", "sweep"])
def test_spectral(diag123, mode):
    code, out, _ = _run(["spectral", "-i", diag123, "--mode", mode])
    assert code == 0
    res = json.loads(out)["result"]
    assert sorted(res["eigenvalues"]) == pytest.approx([1, 2, 3])
    assert res["mode"] == mode
    assert list(res) == ["eigenvalues", "frame", "mode", "iterations", "max_offdiagonal"]


def test_oracle_stdin(monkeypatch):
    doc = json.dumps({"dim": 3, "matrix": [[1, 0, 0], [0, 2, 0], [0, 0, 3]]})
    code, out, _ = _run(["oracle", "-i", "-", "--samples", "200"], stdin=doc, monkeypatch=monkeypatch)
    assert code == 0
    res = json.loads(out)["result"]
    assert list(res) == ["min", "max", "argmin_plane", "argmax_plane", "samples", "histogram"]
    assert len(res["histogram"]) == 64


def test_plane_for(diag123):
    code, out, _ = _run(["plane-for", "-i", diag123, "--value", "4", "--samples", "300"])
    assert code == 0
    assert abs(json.loads(out)["result"]["error"]) <= 1e-8


def test_plane_for_out_of_range(diag123):
    code, _, err = _run(["plane-for", "-i", diag123, "--value", "7", "--samples", "300"])
    assert code == 1 and "outside" in err


def test_realize():
    code, out, _ = _run(["realize", "--interval", "2,6", "--dim", "3", "--step", "1e-3", "--samples", "512"])
    assert code == 0
    res = json.loads(out)["result"]
    assert list(res)[:6] == ["target", "eigenvalues", "measured_range", "max_symmetry_violation", "max_component_error", "step"]
    assert res["measured_range"] == pytest.approx([2, 6], abs=2e-4)


def test_realize_unrealizable():
    code, _, err = _run(["realize", "--interval", "-3,-1"])
    assert code == 1 and "error" in err


@pytest.mark.parametrize(
    "argv",
    [["nope"], [], ["bounds"], ["realize"], ["bounds", "-i", "/does/not/exist.json"], ["bounds", "--tol", "0"]],
)
def test_input_errors(argv):
    assert _run(argv)[0] == 1


def test_malformed_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    code, _, err = _run(["bounds", "-i", str(p)])
    assert code == 1 and "malformed" in err


def test_schema_errors(tmp_path):
    for doc in ({"dim": 2}, {"dim": 2, "matrix": [[1, 2, 3]]}, {"dim": 0, "matrix": []}, {"dim": 2, "matrix": [["a", 1], [1, 1]]}):
        assert _run(["bounds", "-i", _write(tmp_path, "x.json", doc)])[0] == 1


def test_output_file(tmp_path, diag123):
    target = tmp_path / "rep.json"
    code, out, _ = _run(["bounds", "-i", diag123, "-o", str(target), "--samples", "100"])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["config"]["output_path"] == str(target)


def test_byte_identical_reports(diag123):
    argv = ["oracle", "-i", diag123, "--seed", "7", "--samples", "3000"]
    a = _run(argv + ["--workers", "1"])[1]
    b = _run(argv + ["--workers", "4"])[1]
    c = _run(argv + ["--workers", "1"])[1]
    assert a == b == c


def test_module_entry_point(diag123):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "sectional", "bounds", "-i", diag123, "--samples", "64"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["M"] == 6.0
