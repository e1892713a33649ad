import json
import math

import pytest

from suplift.barthe import BartheInstance
from suplift.harness.cli import main
from suplift.polytope import Polytope
from suplift.stepfn import LayeredFunction


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_verify_writes_report_and_exit_code(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--case", "BM_2D", "--case", "PrekopaLeindler:t=1/4", "--instances", "2",
                 "--samples", "20000", "--out", str(out)])
    assert code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 4 and {r["status"] for r in rows} == {"pass"}
    assert "worst margin" in capsys.readouterr().err


def test_verify_fails_on_corrupted_case(tmp_path, capsys):
    code = main(["verify", "--case", "BM_2D:rhs_factor=1.1", "--instances", "2", "--format", "csv",
                 "--out", str(tmp_path / "r.csv")])
    assert code == 1
    assert "BM_2D(rhs_factor=1.1)" in capsys.readouterr().err
    assert (tmp_path / "r.csv").read_text().startswith("case,seed,lhs")


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "nope"]) == 2


def test_supconv_command(tmp_path):
    f = write(tmp_path / "f.json", LayeredFunction.indicator(Polytope.segment(0, 1), 2.0).to_json())
    g = write(tmp_path / "g.json", LayeredFunction.indicator(Polytope.segment(0, 2), 1.0).to_json())
    out = tmp_path / "h.json"
    assert main(["supconv", "--family", "affine", "--inputs", f, g, "--alpha", "0", "--t", "0.5",
                 "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["integral"] == pytest.approx(1.5 * math.sqrt(2), rel=1e-14)
    assert res["h"]["pieces"][0]["value"] == pytest.approx(math.sqrt(2))


def test_barthe_command(tmp_path):
    inst = write(tmp_path / "i.json", BartheInstance.coordinate_projections(2).to_json())
    out = tmp_path / "e.json"
    assert main(["barthe", "--instance", inst, "--starts", "2", "--floor-samples", "100",
                 "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["E"] == pytest.approx(1.0, abs=1e-9) and res["geometric"]
    assert len(res["starts"]) == 2


def test_schneider_command(tmp_path):
    body = write(tmp_path / "k.json", Polytope([[0, 0], [1, 0], [0, 1]]).to_json())
    out = tmp_path / "s.json"
    assert main(["schneider", "--body", body, "--m", "1", "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["ratio"] == pytest.approx(6.0, abs=1e-9)
    assert res["rogers_shephard_bound"] == 6 and res["schneider_constant"] == 4.0


def test_means_command(tmp_path):
    w = [0.5, 0.5]
    ok = {"W": {"p": 0.5, "weights": w}, "M": {"p": -0.5, "weights": w},
          "N": {"p": "-inf", "weights": w}, "bounds": ["inf", "inf"]}
    assert main(["means", "--check", write(tmp_path / "ok.json", ok), "--samples", "100",
                 "--out", str(tmp_path / "o.json")]) == 0
    g = {"kind": "gaussian", "t": 0.5}
    bad = {"W": g, "M": g, "N": g, "bounds": [1, 1]}
    assert main(["means", "--check", write(tmp_path / "bad.json", bad), "--samples", "300",
                 "--out", str(tmp_path / "b.json")]) == 1


def test_plotdata_command(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["plotdata", "--case", "PrekopaLeindler", "--out", str(out), "--resolution", "21"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,y,f,g,h" and len(lines) == 21 * 21 + 1
    out2 = tmp_path / "q.csv"
    assert main(["plotdata", "--case", "BM_2D", "--out", str(out2), "--resolution", "11"]) == 0
    assert main(["plotdata", "--case", "MeanHolderFuzz", "--out", str(tmp_path / "z.csv")]) == 2
