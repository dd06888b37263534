import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from loewnerlab import io
from loewnerlab.cli import main, parse_complex
from loewnerlab.config import RunConfig, load_config
from loewnerlab.driver import Driver
from loewnerlab.flow import hull_grid


@pytest.mark.parametrize("text,value", [
    ("3.31+1.15i", 3.31 + 1.15j), ("3 - 2 i", 3 - 2j), ("2i", 2j), ("-i", -1j),
    ("1e-3+2e1i", 0.001 + 20j), ("4", 4 + 0j), (" 0 ", 0j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["abc", "3+", "nan", "1+infi", ""])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_params_cli(capsys, tmp_path):
    code, out = run(capsys, "params", "--family", "1", "--c", "3.31+1.15i", "--out-dir", str(tmp_path))
    assert code == 0
    rep = json.loads(out.out)
    assert rep["schema"] == "v1" and rep["phase"]["re_alpha"] > 0
    code, out = run(capsys, "params", "--family", "2", "--c", "0", "--out-dir", str(tmp_path))
    rep = json.loads(out.out)
    assert rep["params"]["D"] == [2.0, 0.0] and rep["params"]["E"] == [-2.0, 0.0]


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "params", "--family", "1", "--c", "4")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["params", "--family", "1", "--c", "four"])
    assert e.value.code == 1


def test_deterministic_json(capsys, tmp_path):
    argv = ["trace", "--c", "2+1i", "--samples", "64", "--out-dir", str(tmp_path)]
    _, a = run(capsys, *argv)
    csv_a = (tmp_path / "trace_2p1i_upper.csv").read_bytes()
    _, b = run(capsys, *argv)
    assert a.out == b.out
    assert csv_a == (tmp_path / "trace_2p1i_upper.csv").read_bytes()


def test_config_file_and_env(tmp_path, monkeypatch):
    p = tmp_path / "run.cfg"
    p.write_text("# tolerances\node_tol = 1e-8\ngrid_nx=40\n")
    cfg = load_config(p)
    assert cfg.ode_tol == 1e-8 and cfg.grid_nx == 40
    monkeypatch.setenv("LOEWNER_CONFIG", str(p))
    assert load_config().grid_nx == 40
    assert load_config(grid_nx=50).grid_nx == 50
    p.write_text("nonsense = 3\n")
    with pytest.raises(ValueError):
        load_config(p)


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(ode_tol=0)
    with pytest.raises(ValueError):
        RunConfig(grid_nx=1)


def test_set_override(capsys, tmp_path):
    code, out = run(capsys, "grid", "--c", "3i", "--family", "2", "--set", "grid_nx=11",
                    "--set", "grid_ny=12", "--threads", "1", "--pgm", "--out-dir", str(tmp_path))
    assert code == 0
    rep = json.loads(out.out)
    assert (rep["nx"], rep["ny"]) == (11, 12)
    pgm = (tmp_path / "grid_0p3i.pgm").read_bytes()
    assert pgm.startswith(b"P5\n11 12\n255\n") and len(pgm) == len(b"P5\n11 12\n255\n") + 132


def test_grid_csv(tmp_path):
    g = hull_grid(Driver.constant(0), region=(-1, 1, -3, 3), nx=5, ny=6, workers=1)
    lines = io.write_grid_csv(tmp_path / "g.csv", g).read_text().splitlines()
    assert lines[0] == "x,y,status,T_z" and len(lines) == 31


def test_report_plain():
    rep = io.report("x", {"z": 1 + 2j, "a": np.arange(2), "bad": float("nan")})
    assert rep == {"schema": "v1", "kind": "x", "z": [1.0, 2.0], "a": [0, 1], "bad": None}


def test_svg_orientation():
    s = io.Svg(100, 100, margin=0.0)
    s.points([0, 1j], r=1)
    root = ET.fromstring(s.render("t"))
    ys = [float(c.get("cy")) for c in root.iter("{http://www.w3.org/2000/svg}circle")]
    assert ys[0] > ys[1]  # larger imaginary part is drawn higher


def _svgs(paths):
    return [p for p in paths if str(p).endswith(".svg")]


def test_figure1(capsys, tmp_path):
    code, out = run(capsys, "figure", "--id", "1", "--out-dir", str(tmp_path))
    assert code == 0
    files = json.loads(out.out)["files"]
    assert any(f.endswith("fig1_boundary.csv") for f in files)
    for f in _svgs(files):
        ET.parse(f)


def test_figure5(capsys, tmp_path):
    code, out = run(capsys, "figure", "--id", "5", "--out-dir", str(tmp_path))
    assert code == 0
    svgs = _svgs(json.loads(out.out)["files"])
    assert len(svgs) == 6
    for f in svgs:
        root = ET.parse(f).getroot()
        assert root.get("version") == "1.1"


def test_figure2_loop(capsys, tmp_path):
    code, out = run(capsys, "figure", "--id", "2", "--c", "5+2i", "--out-dir", str(tmp_path))
    assert code == 0
    files = json.loads(out.out)["files"]
    assert any(f.endswith("_interior.csv") for f in files)
    text = open(_svgs(files)[0]).read()
    assert io.UPPER_COLOR in text and io.LOWER_COLOR in text


def test_verify_params_suite(capsys, tmp_path):
    code, out = run(capsys, "verify", "--suite", "params", "--report", str(tmp_path / "r.json"),
                    "--out-dir", str(tmp_path))
    assert code == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["passed"] and rep["suite"] == "params"
