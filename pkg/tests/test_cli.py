import csv
import json

import numpy as np
import pytest

from corrph import ValidationError, exponential
from corrph.cli import main, parse_grid

from reference import RUIN_TABLE, RUIN_TABLE_TOL


def _rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_parse_grid():
    assert np.allclose(parse_grid("0:10:11"), np.arange(11.0))
    g = parse_grid("0.1:100:4:log")
    assert np.allclose(g, [0.1, 1.0, 10.0, 100.0])
    for bad in ("0:10", "1:0:5", "a:2:3", "0:10:5:lin", "0:10:5:log", "-1:2:3", "0:1:0"):
        with pytest.raises(ValidationError):
            parse_grid(bad)


def test_approx_table_reproduces_published_columns(tmp_path):
    out = tmp_path / "t1.csv"
    assert main(["approx-table", "--no-bounds", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# task: approx-table")
    assert "rho_eps" in text and "p_eps" in text
    rows = _rows(out)
    assert len(rows) == 11
    for col in ("exact", "discard", "replace", "corrected_discard", "corrected_replace"):
        got = np.array([float(r[col]) for r in rows])
        assert np.max(np.abs(got - RUIN_TABLE[col])) < RUIN_TABLE_TOL


def test_exact_table_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["exact-table", "--grid", "0:5:6", "--out", str(a)]) == 0
    assert main(["exact-table", "--grid", "0:5:6", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a)
    assert float(rows[0]["exact"]) == pytest.approx(0.5, abs=1e-9)


def test_var_table_without_simulation(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"horizons": [1, 5]}))
    out = tmp_path / "v.csv"
    assert main(["var-table", "--config", str(cfg), "--no-sim", "--out", str(out)]) == 0
    rows = _rows(out)
    assert [float(r["t"]) for r in rows] == [1.0, 5.0]
    assert abs(float(rows[0]["corrected_discard"]) - 4.14) <= 0.02
    assert abs(float(rows[1]["discard"]) - 9.54) <= 0.02


def test_var_table_simulation_is_reproducible(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"horizons": [1], "sim": {"samples": 20000, "streams": 2}}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["var-table", "--config", str(cfg), "--seed", "7", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    row = _rows(a)[0]
    assert float(row["sim_ci_low"]) <= float(row["simulation"]) <= float(row["sim_ci_high"])


def test_curve_writes_one_file_per_load(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"loads": [0.5, 0.7]}))
    out = tmp_path / "curve.csv"
    assert main(["curve", "--config", str(cfg), "--grid", "0:4:3", "--no-bounds", "--out", str(out)]) == 0
    for load in ("0.5", "0.7"):
        path = tmp_path / f"curve_rho{load}.csv"
        assert path.exists()
        assert len(_rows(path)) == 3


def test_check_task(tmp_path):
    out = tmp_path / "check.txt"
    assert main(["check", "--cases", "3", "--out", str(out)]) == 0
    assert "violations" in out.read_text()


def test_exit_codes(tmp_path, capsys):
    assert main(["exact-table", "--grid", "1:0:3"]) == 2
    assert "grid" in capsys.readouterr().err
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"model": {"rho": 0.5, "eps": 0.1, "ph": exponential(3.0).to_dict()}}))
    assert main(["approx-table", "--config", str(cfg)]) == 2
    assert "heavy" in capsys.readouterr().err
    cfg.write_text("{not json")
    assert main(["approx-table", "--config", str(cfg)]) == 2
    assert main(["approx-table", "--config", str(tmp_path / "missing.json")]) == 2
    # delta = 0.283, theta = 1.7, eps = 0.5: stable, but the replace
    # condition needs eps < (1 - delta) / theta = 0.42.
    model = {"lam": 0.85, "eps": 0.5, "ph": exponential(3.0).to_dict(),
             "heavy": {"kind": "lomax", "params": {"scale": 1.0, "shape": 1.5}}}
    cfg.write_text(json.dumps({"model": model}))
    assert main(["approx-table", "--config", str(cfg), "--no-bounds"]) == 3
    assert "replace" in capsys.readouterr().err
    model["lam"] = 5.0
    cfg.write_text(json.dumps({"model": model}))
    assert main(["approx-table", "--config", str(cfg)]) == 3
