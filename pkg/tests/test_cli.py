import json

import pytest

from fraccable.cli import main
from fraccable.config import load_config, parse_config
from fraccable.exceptions import ParameterError

TOML = """
[problem]
case = "Example1_1D_weak"
gamma = 0.3
kappa = 0.9

[mesh]
n_cells = 200

[scheme]
family = "fbt"
theta_gamma = 0.0
theta_kappa = 0.49
n_steps = 10

[correction]
mode = "corrected"

[output]
snapshots = [0, 10]
"""


def test_weights_to_stdout(capsys):
    assert main(["weights", "--family", "fbt", "--alpha", "1", "--theta", "0", "--n", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "k,omega_k"
    assert [float(line.split(",")[1]) for line in lines[1:]] == [1.5, -2.0, 0.5, 0.0]


def test_weights_to_file(tmp_path):
    out = tmp_path / "w.csv"
    assert main(["weights", "--family", "fbn", "--alpha", "0.5", "--theta", "1", "--n", "5", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 7 and float(rows[1].split(",")[1]) == pytest.approx(1.0606601717798212)


def test_weights_bad_theta(capsys):
    assert main(["weights", "--family", "fbt", "--alpha", "0.5", "--theta", "0.5", "--n", "3"]) == 2
    assert "theta" in capsys.readouterr().err


def test_spectral_epsilon0(capsys):
    assert main(["spectral", "--epsilon0", "--family", "fbt", "--alpha", "1", "--theta", "0"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.25, abs=1e-12)


def test_spectral_mineig(capsys):
    assert main(["spectral", "--mineig", "--alpha", "1", "--n", "2", "--shift", "0"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.5)


def test_spectral_needs_alpha(capsys):
    assert main(["spectral", "--mineig", "--n", "4"]) == 2


def test_spectral_contour(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["spectral", "--contour", "--n-alpha", "3", "--n-theta", "4", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "alpha,theta,H" and len(rows) == 13
    assert min(float(r.split(",")[2]) for r in rows[1:]) >= -1e-9


def test_solve_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(TOML)
    out = tmp_path / "out"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    errors = (out / "errors.csv").read_text().splitlines()
    assert errors[0] == "n,t_n,error" and len(errors) == 12
    summary = json.loads((out / "summary.json").read_text())
    assert summary["E"] > 0 and "total" in summary["timings"]
    snap = (out / "snapshot_10.csv").read_text().splitlines()
    assert snap[0] == "x,value" and len(snap) == 202


def test_solve_json_config_2d(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps(
            {
                "problem": {"case": "Example2_2D_smooth", "gamma": 0.8, "kappa": 0.9},
                "mesh": {"n_cells": 8},
                "scheme": {"family": "fbt", "n_steps": 4},
                "correction": {"mode": "off"},
                "output": {"snapshots": [4]},
            }
        )
    )
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    snap = (tmp_path / "o" / "snapshot_4.csv").read_text().splitlines()
    assert snap[0] == "x,y,value" and len(snap) == 82


def test_sweep_check_passes(tmp_path, capsys):
    assert main(["sweep", "--table", "3", "--workers", "1", "--out", str(tmp_path), "--check"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert (tmp_path / "report.csv").exists() and (tmp_path / "report.json").exists()


def test_sweep_check_fails_nonzero(tmp_path, monkeypatch, capsys):
    from fraccable import harness

    monkeypatch.setitem(harness._TOLERANCES, "3", (1e-9, 1e-9))
    assert main(["sweep", "--table", "3", "--workers", "1", "--out", str(tmp_path), "--check"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_config_parse_variants(tmp_path):
    base = {
        "problem": {"case": "Example1_ML", "gamma": 0.8},
        "mesh": {"n_cells": 50},
        "scheme": {"family": "fbn", "n_steps": 20, "theta_gamma": 0.5},
    }
    cfg = parse_config(base)
    assert cfg.correction is True and cfg.kappa is None
    cfg = parse_config({**base, "correction": {"gamma": [0.8], "time": [0.8, 1.6]}})
    assert cfg.correction.gamma == (0.8,) and cfg.correction.kappa == ()
    assert parse_config({**base, "correction": {"mode": "baseline"}}).correction is False


@pytest.mark.parametrize(
    "patch",
    [
        {"extra": {}},
        {"problem": {"case": "nope", "gamma": 0.5}},
        {"problem": {"case": "Example1_ML", "gamma": 0.8, "colour": 1}},
        {"correction": {"mode": "sometimes"}},
        {"output": {"snapshots": [99]}},
        {"mesh": {}},
    ],
)
def test_config_rejects(patch):
    base = {
        "problem": {"case": "Example1_ML", "gamma": 0.8},
        "mesh": {"n_cells": 50},
        "scheme": {"family": "fbn", "n_steps": 20},
    }
    base.update(patch)
    with pytest.raises(ParameterError):
        parse_config(base)


def test_config_suffix(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("x")
    with pytest.raises(ParameterError):
        load_config(p)
