import json
import math
import pathlib
import subprocess
import sys
import xml.etree.ElementTree as ET

import jsonschema
import numpy as np
import pytest

from pxprobe.cli import main
from pxprobe.oracles import load_points

SCHEMAS = pathlib.Path(__file__).resolve().parents[1] / "docs" / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


@pytest.fixture
def pts(tmp_path):
    f = tmp_path / "p.csv"
    assert main(["generate", "--shape", "uniform", "--n", "80", "--d", "2", "--seed", "7",
                 "--out", str(f)]) == 0
    return f


@pytest.fixture
def square_file(tmp_path):
    f = tmp_path / "square.csv"
    f.write_text("# dim=2\n0,0\n0,1\n1,0\n1,1\n")
    return f


def run(tmp_path, *argv):
    out = tmp_path / "r.json"
    code = main([*argv, "--report", str(out)])
    return code, (json.loads(out.read_text()) if code == 0 else None)


def test_generate_shapes(tmp_path):
    f = tmp_path / "c.csv"
    assert main(["generate", "--shape", "counterexample", "--n", "3", "--out", str(f)]) == 0
    P = load_points(f)
    np.testing.assert_allclose(np.diag(P), np.sqrt(1 - 2.0 ** -np.arange(2, 5)))
    assert np.count_nonzero(P) == 3
    f = tmp_path / "circle.csv"
    main(["generate", "--shape", "circle", "--n", "64", "--out", str(f)])
    r = np.linalg.norm(load_points(f) - 0.5, axis=1)
    assert np.all(np.abs(r - 0.4) <= 1e-12)
    f = tmp_path / "cl.csv"
    main(["generate", "--shape", "clusters", "--n", "100", "--d", "3", "--out", str(f)])
    P = load_points(f)
    assert P.shape == (100, 3) and P.min() >= 0 and P.max() <= 1


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (a, b):
        main(["generate", "--n", "10", "--d", "2", "--seed", "7", "--out", str(f)])
    assert a.read_bytes() == b.read_bytes()


def test_greedy_report(tmp_path, pts):
    code, rep = run(tmp_path, "greedy", "--points", str(pts), "--iters", "50", "--mode", "exact")
    assert code == 0
    assert len(rep["payload"]["steps"]) == 50 and rep["payload"]["probe_count"] == 50
    jsonschema.validate(rep, schema("greedy"))


def test_greedy_ann_adversarial(tmp_path, pts):
    code, rep = run(tmp_path, "greedy", "--points", str(pts), "--iters", "20", "--mode", "ann",
                    "--eps", "0.2", "--adversarial")
    assert code == 0 and rep["payload"]["oracle_stats"]["ann_queries"] == 20
    jsonschema.validate(rep, schema("greedy"))


def test_greedy_with_oracle_config(tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"kind": "sphere", "dim": 2,
                               "params": {"center": [0.5, 0.5], "radius": 0.3}}))
    code, rep = run(tmp_path, "greedy", "--oracle", str(cfg), "--iters", "15")
    assert code == 0 and rep["payload"]["probe_count"] == 15


def test_diameter_report(tmp_path, square_file):
    code, rep = run(tmp_path, "diameter", "--points", str(square_file))
    assert code == 0
    assert math.sqrt(2) / 3 <= rep["payload"]["estimate"] <= 3 * math.sqrt(2)
    jsonschema.validate(rep, schema("diameter"))


def test_hull_out_example(tmp_path, square_file):
    code, rep = run(tmp_path, "hull", "--points", str(square_file), "--query", "1.5,0.5",
                    "--eps", "0.1", "--mode", "exact-extremal")
    assert code == 0 and rep["payload"]["verdict"] == "Out"
    jsonschema.validate(rep, schema("hull"))


@pytest.mark.parametrize("mode", ["exact-extremal", "approx-extremal", "ann"])
def test_hull_in(tmp_path, square_file, mode):
    code, rep = run(tmp_path, "hull", "--points", str(square_file), "--query", "0.5,0.5",
                    "--mode", mode, "--delta-big", "1.5", "--adversarial")
    assert code == 0 and rep["payload"]["verdict"] == "In"
    jsonschema.validate(rep, schema("hull"))


def test_density_report(tmp_path, pts):
    code, rep = run(tmp_path, "density", "--points", str(pts), "--k", "16", "--seed", "3")
    assert code == 0 and rep["payload"]["max_size"] <= 16
    jsonschema.validate(rep, schema("density"))
    code, rep = run(tmp_path, "density", "--points", str(pts), "--k", "16", "--seed", "3",
                    "--initial-size", "4")
    assert rep["payload"]["attempts"][0]["sample_size"] == 4 and rep["payload"]["max_size"] <= 16


def test_reports_are_byte_identical(tmp_path, pts):
    for argv in (["greedy", "--points", str(pts), "--iters", "30"],
                 ["density", "--points", str(pts), "--k", "8", "--seed", "2", "--initial-size", "5"],
                 ["hull", "--points", str(pts), "--query", "0.4,0.6", "--mode", "ann"]):
        blobs = []
        for _ in range(2):
            out = tmp_path / "same.json"
            assert main([*argv, "--report", str(out)]) == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


def test_timing_is_opt_in(tmp_path, pts):
    _, rep = run(tmp_path, "greedy", "--points", str(pts), "--iters", "3")
    assert "wall_time" not in rep
    _, rep = run(tmp_path, "greedy", "--points", str(pts), "--iters", "3", "--timing")
    assert rep["wall_time"] >= 0
    jsonschema.validate(rep, schema("greedy"))


def test_svg_outputs(tmp_path, pts, square_file):
    for argv in (["greedy", "--points", str(pts), "--iters", "20"],
                 ["hull", "--points", str(square_file), "--query", "1.2,0.5"],
                 ["density", "--points", str(pts), "--k", "10", "--initial-size", "8"]):
        svg = tmp_path / f"{argv[0]}.svg"
        assert main([*argv, "--report", str(tmp_path / "r.json"), "--svg", str(svg)]) == 0
        root = ET.parse(svg).getroot()
        assert root.tag.endswith("svg") and len(root) > 3


def test_usage_errors(tmp_path, pts, capsys):
    P3 = tmp_path / "p3.csv"
    main(["generate", "--n", "20", "--d", "3", "--out", str(P3)])
    assert main(["greedy", "--points", str(P3), "--iters", "5", "--svg", "x.svg"]) == 2
    assert main(["greedy", "--points", str(pts), "--iters", "5", "--mode", "ann"]) == 2
    assert main(["greedy", "--points", str(pts), "--iters", "0"]) == 2
    assert main(["density", "--points", str(pts), "--k", "0"]) == 2
    assert main(["hull", "--points", str(pts), "--query", "0.5,0.5", "--eps", "1.5"]) == 2
    assert main(["hull", "--points", str(pts), "--query", "0.5,0.5,0.5"]) == 2
    assert main(["greedy", "--iters", "5"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["greedy", "--points", str(pts)])
    assert exc.value.code == 2


def test_input_and_io_errors(tmp_path, pts):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    assert main(["greedy", "--points", str(bad), "--iters", "2"]) == 3
    assert main(["hull", "--points", str(pts), "--query", "a,b"]) == 3
    assert main(["greedy", "--points", str(tmp_path / "missing.csv"), "--iters", "2"]) == 4
    assert main(["generate", "--n", "3", "--out", str(tmp_path / "no" / "dir.csv")]) == 4


def test_console_script(tmp_path):
    out = tmp_path / "g.csv"
    res = subprocess.run([sys.executable, "-m", "pxprobe.cli", "generate", "--n", "5",
                          "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0 and out.exists()
