import json

import numpy as np
import pytest

from critorbit.cli import config_hash, main, parse_complex
from critorbit.param_plane import read_pgm


def _csv_values(path):
    rows = [l.split(",") for l in path.read_text().splitlines() if not l.startswith("#")][1:]
    return np.array([complex(float(r[0]), float(r[1])) for r in rows])


def test_parse_complex():
    assert parse_complex("3+4i") == 3 + 4j
    assert parse_complex("-i") == -1j
    assert parse_complex(6) == 6


def test_solve(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["solve", "--fixture", "quad.json", "--driver", "0", "--nmax", "4",
                 "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# critorbit ") and "re,im,multiplicity" in text
    vals = _csv_values(out)
    assert np.min(np.abs(vals)) < 1e-9 and np.min(np.abs(vals + 1)) < 1e-9


def test_relate(tmp_path):
    out = tmp_path / "r.json"
    assert main(["relate", "--fixture", "odd_cubic.json", "--nmax", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    sym = doc["symmetries"][0]
    assert sym["kind"] == "affine" and sym["zcoeffs"] == [[], [["-1", "0"]]]
    assert {"i": 2, "j": 1, "n": 1, "m": 1} in sym["relations"]
    assert doc["version"] and doc["config_hash"]


def test_per1_search(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["per1", "--lambda", "6", "--pcf-search", "--out", str(out)]) == 0
    vals = _csv_values(out)
    assert np.min(np.abs(vals + (1 + 5 ** 0.5) / 2)) < 1e-6


def test_per1_summary(tmp_path):
    out = tmp_path / "p.json"
    assert main(["per1", "--lambda", "3+4i", "--window", "-2,2,-2,2", "--res", "64",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert abs(doc["robin_plus"] - doc["robin_predicted"]) < 1e-6
    assert (tmp_path / "p_plus.pgm").exists() and (tmp_path / "p_minus.pgm").exists()


def test_equidist(tmp_path):
    out = tmp_path / "e.json"
    assert main(["equidist", "--fixture", "quad.json", "--point", "t", "--n", "6",
                 "--probes", "2,-3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["set_size"] == 64 and doc["max_discrepancy"] < 1e-9


def test_render_and_determinism(tmp_path):
    args = ["render", "--fixture", "cubic_056.json", "--window", "1.2", "--res", "48"]
    assert main(args + ["--out", str(tmp_path / "a"), "--threads", "1"]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a, b = (tmp_path / "a.pgm").read_bytes(), (tmp_path / "b.pgm").read_bytes()
    assert a == b
    img = read_pgm(tmp_path / "a.pgm")
    assert img.shape == (48, 48)
    assert np.any((img > 0) & (img < 65535))  # gray: only one critical orbit bounded
    side = json.loads((tmp_path / "a.json").read_text())
    assert side["config_hash"].encode() in a


def test_tiny_raster(tmp_path):
    assert main(["render", "--fixture", "quad.json", "--res", "2", "--kind", "mass",
                 "--out", str(tmp_path / "t")]) == 0
    assert read_pgm(tmp_path / "t.pgm").shape == (2, 2)


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"fixture": "quad.json", "res": 64, "kind": "locus"}))
    assert main(["render", "--config", str(cfg), "--res", "16", "--out", str(tmp_path / "c")]) == 0
    side = json.loads((tmp_path / "c.json").read_text())
    assert side["config"]["res"] == 16 and side["config"]["kind"] == "locus"


@pytest.mark.parametrize("argv", [
    ["render", "--fixture", "nope.json"],
    ["render", "--fixture", "quad.json", "--res", "0"],
    ["render"],
    ["per1", "--lambda", "abc"],
    ["bogus"],
])
def test_config_errors(argv, capsys):
    assert main(argv) == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"fixture": "quad.json", "colour": "red"}))
    assert main(["render", "--config", str(cfg)]) == 2


def test_compute_error(capsys):
    # f^n(t) = 0 for degree beyond the solver limit
    assert main(["equidist", "--fixture", "quad.json", "--point", "t", "--n", "14"]) == 3
    assert "DegreeCapExceeded" in capsys.readouterr().err


def test_hash_ignores_threads_and_out():
    base = {"fixture": "quad.json", "res": 8}
    assert config_hash(base) == config_hash({**base, "threads": 4, "out": "x"})
    assert config_hash(base) != config_hash({**base, "res": 9})
