"""End-to-end tests of the command-line driver and its file outputs."""

import json

import numpy as np
import pytest

from stratmodes import __version__
from stratmodes.cli import main

SLAB_STACK = {
    "ambient_in": {"type": "constant", "n": 1.0},
    "layers": [{"material": {"type": "constant", "n": 1.5}, "thickness": 1.0}],
    "ambient_out": {"type": "constant", "n": 1.0},
}


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0] == f"# stratmodes {__version__}"
    assert lines[1].startswith("# config ")
    header = lines[2].split(",")
    rows = [line.split(",") for line in lines[3:]]
    return header, rows


def test_modes_subcommand(tmp_path):
    cfg = write_config(tmp_path, {
        "stack": SLAB_STACK,
        "region": {"re_min": 0.066, "re_max": 4.5, "im_min": -2.0,
                   "im_max": -0.5},
    })
    out = tmp_path / "out"
    assert main(["modes", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out / "modes.csv")
    assert header == ["re_omega", "im_omega", "multiplicity", "method",
                      "residual"]
    assert len(rows) == 2
    w1 = complex(float(rows[0][0]), float(rows[0][1]))
    assert abs(w1 - (np.pi - 1j * np.log(5.0)) / 1.5) < 1e-9
    summary = json.loads((out / "modes_summary.json").read_text())
    assert summary["count"] == 2
    assert summary["_meta"]["tool"] == "stratmodes"


def test_modes_quarterwave(tmp_path):
    cfg = write_config(tmp_path, {
        "quarterwave": {"n_ratio": 1.5, "num_layers": 8},
    })
    out = tmp_path / "out"
    assert main(["modes", "--config", cfg, "--out", str(out)]) == 0
    _, rows = read_csv(out / "modes.csv")
    assert len(rows) == 8
    assert all(r[3] == "exact-polynomial" for r in rows)


def test_byte_identical_reruns(tmp_path):
    cfg = write_config(tmp_path, {
        "stack": SLAB_STACK,
        "region": {"re_min": 0.066, "re_max": 4.5, "im_min": -2.0,
                   "im_max": -0.5},
    })
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert main(["modes", "--config", cfg, "--out", str(out),
                     "--seed", "3"]) == 0
    assert (out1 / "modes.csv").read_bytes() == (out2 / "modes.csv").read_bytes()
    assert ((out1 / "modes_summary.json").read_bytes()
            == (out2 / "modes_summary.json").read_bytes())


def test_spectrum_subcommand(tmp_path):
    cfg = write_config(tmp_path, {
        "stack": SLAB_STACK,
        "grid": {"start": 0.5, "stop": 6.0, "num": 400},
    })
    out = tmp_path / "out"
    assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out / "spectrum.csv")
    assert header == ["omega", "R", "T", "is_peak", "fwhm"]
    assert len(rows) == 400
    summary = json.loads((out / "spectrum_summary.json").read_text())
    assert summary["lossless"] is True
    assert summary["max_abs_R_plus_T_minus_1"] < 1e-12
    assert summary["num_peaks"] >= 2


def test_completeness_subcommand(tmp_path):
    cfg = write_config(tmp_path, {
        "completeness": {"set": "sine", "size": 2000, "truncation": 2000},
        "constancy": {"A": 0.25, "d": 1.0, "truncation": 1000,
                      "z_min": 100.0, "z_max": 300.0, "num": 3},
    })
    out = tmp_path / "out"
    assert main(["completeness", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "completeness.json").read_text())
    assert report["classification"] == "incomplete"
    header, rows = read_csv(out / "constancy.csv")
    assert header == ["abs_z", "abs_L"]
    assert len(rows) == 3
    summary = json.loads((out / "constancy_summary.json").read_text())
    assert summary["residue_bound"] > 0


def test_census_subcommand(tmp_path):
    cfg = write_config(tmp_path, {
        "stack": {
            "ambient_in": {"type": "constant", "n": 1.0},
            "layers": [{"material": {"type": "lorentz", "f": 0.25,
                                     "omega0": 1.0, "gamma": 1e-3},
                        "thickness": 1.0}],
            "ambient_out": {"type": "constant", "n": 1.0},
        },
        "region": {"re_min": 0.0, "re_max": 1.2, "im_min": -0.1,
                   "im_max": 0.0},
        "census": {"pole": [0.9999998749999922, -0.0005],
                   "radii": [0.1, 0.05, 0.02, 0.01]},
    })
    out = tmp_path / "out"
    assert main(["census", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out / "census.csv")
    assert header == ["radius", "count"]
    counts = {float(r): int(c) for r, c in rows}
    assert counts[0.1] > counts[0.01] > 0
    summary = json.loads((out / "census_summary.json").read_text())
    assert summary["non_decreasing"] is True


def test_asymptotics_subcommand(tmp_path):
    cfg = write_config(tmp_path, {
        "asymptotics": {"A": 0.25, "d": 1.0, "m_values": [10, 20, 50]},
    })
    out = tmp_path / "out"
    assert main(["asymptotics", "--config", cfg, "--out", str(out)]) == 0
    _, rows = read_csv(out / "asymptotics.csv")
    assert len(rows) == 3
    residuals = [float(r[4]) for r in rows]
    assert residuals[0] > residuals[1] > residuals[2]


def test_malformed_config_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["modes", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "config error" in capsys.readouterr().err

    unknown = write_config(tmp_path, {"bogus": 1}, "unknown.json")
    assert main(["modes", "--config", unknown, "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "bogus" in err

    missing = write_config(tmp_path, {"stack": SLAB_STACK}, "missing.json")
    assert main(["modes", "--config", missing, "--out", str(tmp_path)]) == 1


def test_nonexistent_config_exits_1(tmp_path, capsys):
    assert main(["modes", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 1
    assert "config error" in capsys.readouterr().err
