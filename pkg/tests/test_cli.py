import json
import math
from pathlib import Path

import pytest

from xtalk.cli import run
from xtalk.io import read_csv

BAD = sorted((Path(__file__).parent / "fixtures" / "bad_configs").glob("*.json"))
FAST = {"sweep": {"amplitudes": [0.2, 0.8], "detuning_points": 3, "scan_shapes": ["chirp", "square"]}}


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(FAST))
    return p


def load_json(path):
    return json.loads(Path(path).read_text())


def test_fit_json(tmp_path, cfg_path):
    assert run(["fit", "--config", str(cfg_path), "--out", str(tmp_path / "r")]) == 0
    doc = load_json(tmp_path / "r" / "fit.json")
    res = doc["result"]
    assert set(res) == {"theta", "loss", "iso", "iterations", "converged"}
    assert len(res["iso"]) == 4 and all(len(row) == 4 and len(row[0]) == 2 for row in res["iso"])
    assert doc["format"] == "xtalk-results/1" and doc["config"]["sweep"]["amplitudes"] == [0.2, 0.8]


def test_coin_csv(tmp_path):
    out = tmp_path / "r"
    assert run(["coin", "--lambda-grid", "0:90:5", "--timing", "attacker-first", "--out", str(out)]) == 0
    _, header, rows = read_csv(out / "coin.csv")
    assert header == ["lambda_deg", "p1_ideal", "p1_attacked"] and len(rows) == 19
    for deg, ideal, _ in rows:
        assert abs(float(ideal) - math.sin(math.radians(float(deg))) ** 2) <= 1e-10


def test_scan_default_grid(tmp_path):
    out = tmp_path / "r"
    assert run(["scan", "--out", str(out)]) == 0
    _, header, rows = read_csv(out / "scan.csv")
    assert header == ["coupling", "shape", "influence_norm"] and len(rows) == 10
    vals = [float(r[2]) for r in rows]
    assert vals == sorted(vals, reverse=True)


def test_all_commands_succeed(tmp_path, cfg_path):
    out = tmp_path / "r"
    for cmd in (["qpt"], ["xor"], ["sqqnn"], ["sweep", "--target", "catalyst"], ["detuning", "--shape", "chirp"],
                ["detect", "--shots", "1000"], ["contain"], ["contain", "--protocol", "sqqnn"]):
        assert run([*cmd, "--config", str(cfg_path), "--out", str(out)]) == 0, cmd
    names = {p.name for p in out.iterdir()}
    assert {"qpt.json", "choi.txt", "xor.csv", "sqqnn.json", "sweep_catalyst_q0.csv", "detuning_chirp.csv",
            "detect.json", "contain_coin.json", "contain_sqqnn.json"} <= names
    for p in out.iterdir():
        assert "xtalk-results/1" in p.read_text()


def test_outputs_byte_identical(tmp_path, cfg_path):
    cfg = json.loads(cfg_path.read_text())
    cfg["output"] = {"emit_svg": True}
    cfg_path.write_text(json.dumps(cfg))
    for name in ("a", "b"):
        for cmd in (["sweep"], ["detect"], ["scan"]):
            assert run([*cmd, "--config", str(cfg_path), "--out", str(tmp_path / name)]) == 0
    a = sorted((tmp_path / "a").iterdir())
    assert any(p.suffix == ".svg" for p in a)
    for p in a:
        q = tmp_path / "b" / p.name
        # The echoed output directory differs between the two runs; everything else must match.
        assert p.read_text().replace(str(tmp_path / "a"), "X") == q.read_text().replace(str(tmp_path / "b"), "X")


def test_echoed_config_reproduces_run(tmp_path, cfg_path):
    out = tmp_path / "r1"
    assert run(["sweep", "--config", str(cfg_path), "--out", str(out)]) == 0
    config, _, rows = read_csv(out / "sweep_driver_q1.csv")
    echo = tmp_path / "echo.json"
    echo.write_text(json.dumps(config))
    assert run(["sweep", "--config", str(echo)]) == 0
    out2 = Path(config["output"]["directory"])
    _, _, rows2 = read_csv(out2 / "sweep_driver_q1.csv")
    assert rows == rows2


@pytest.mark.parametrize("path", BAD, ids=lambda p: p.stem)
def test_malformed_config_exit_one(path, tmp_path, capsys):
    assert run(["fit", "--config", str(path), "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_errors_exit_one(tmp_path):
    assert run([]) == 1
    assert run(["teleport"]) == 1
    assert run(["coin", "--lambda-grid", "0:90", "--out", str(tmp_path)]) == 1
    assert run(["fit", "--config", str(tmp_path / "missing.json")]) == 1


def test_missing_dataset_exit_one(tmp_path):
    assert run(["sqqnn", "--dataset", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 1


def test_numerical_failure_exit_two(tmp_path, monkeypatch):
    from xtalk import cli
    from xtalk.errors import ReconstructionError

    def boom(cfg):
        raise ReconstructionError("deficit 1e-3")

    monkeypatch.setattr(cli, "victim_channel", boom)
    assert run(["qpt", "--out", str(tmp_path)]) == 2
