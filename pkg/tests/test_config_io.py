import json
from pathlib import Path

import numpy as np
import pytest

from xtalk.config import RunConfig, parse_grid, parse_grid_text
from xtalk.errors import ConfigError, DatasetError, ValidationError
from xtalk.io import (
    bundled_dataset_path,
    csv_text,
    fmt,
    json_text,
    load_dataset,
    matrix_text,
    parse_matrix_text,
    read_csv,
    write_csv,
)

BAD = sorted((Path(__file__).parent / "fixtures" / "bad_configs").glob("*.json"))


def test_defaults_resolve():
    cfg = RunConfig.from_dict({})
    ac = cfg.attack_config()
    assert ac.coupling.label == "ZX" and ac.time_steps == 50 and ac.substeps_per_step == 20
    assert cfg.lambda_grid_deg()[-1] == 90.0 and len(cfg.lambda_grid_deg()) == 19


def test_partial_override():
    cfg = RunConfig.from_dict({"pulses": {"q0": {"shape": "chirp", "amplitude": 1}}})
    assert cfg.data["pulses"]["q0"]["amplitude"] == 1.0
    assert cfg.data["pulses"]["q1"]["shape"] == "cosine"


@pytest.mark.parametrize("path", BAD, ids=lambda p: p.stem)
def test_bad_configs_rejected(path):
    with pytest.raises(ConfigError):
        RunConfig.load(path)


def test_diagnostics_name_the_field():
    with pytest.raises(ConfigError, match=r"pulses\.q0\.phase"):
        RunConfig.from_dict({"pulses": {"q0": {"phase": 1}}})
    with pytest.raises(ConfigError, match=r"sim\.substeps"):
        RunConfig.from_dict({"sim": {"substeps": "4"}})
    with pytest.raises(ConfigError, match=r"pulses\.q1"):
        RunConfig.from_dict({"pulses": {"q1": {"amplitude": 2.0}}})


def test_json_errors_report_position():
    with pytest.raises(ConfigError, match=r"line 2, column 15"):
        RunConfig.from_json('{"sim":\n  {"substeps" 4}}')


def test_echo_round_trip():
    cfg = RunConfig.from_dict({"coupling": {"type_01": "YX", "type_12": "YX"}, "defense": {"seed": 9}})
    again = RunConfig.from_json(json.dumps(cfg.data))
    assert again.data == cfg.data


def test_override_revalidates():
    cfg = RunConfig.from_dict({})
    assert cfg.override("sim.aux_state", "++").attack_config().aux_state == "++"
    with pytest.raises(ConfigError):
        cfg.override("sim.aux_state", "0")


def test_grids():
    assert parse_grid(0, 90, 5)[-1] == 90 and len(parse_grid(0, 90, 5)) == 19
    assert parse_grid_text("0:10:2.5") == [0.0, 2.5, 5.0, 7.5, 10.0]
    for bad in ("0:10", "a:b:c", "0:10:0", "10:0:1"):
        with pytest.raises(ValidationError):
            parse_grid_text(bad)


def test_bundled_dataset():
    x, y = load_dataset(bundled_dataset_path())
    assert x.shape == (100, 4) and set(y) == {-1, 1}
    assert (y == 1).sum() == 50 and np.array_equal(x[0], [5.1, 3.5, 1.4, 0.2])


def test_dataset_errors(tmp_path):
    cases = {
        "empty.csv": "",
        "header.csv": "a,b,c,d,label\n1,2,3,4,1\n",
        "cell.csv": "f1,f2,f3,f4,label\n1,2,x,4,1\n",
        "label.csv": "f1,f2,f3,f4,label\n1,2,3,4,1\n1,2,3,4,0\n",
        "short.csv": "f1,f2,f3,f4,label\n1,2,3,1\n",
    }
    for name, text in cases.items():
        p = tmp_path / name
        p.write_text(text)
        with pytest.raises(DatasetError) as exc:
            load_dataset(p)
        if name in ("cell.csv", "short.csv"):
            assert "row 2" in str(exc.value)
        if name == "label.csv":
            assert "row 3" in str(exc.value)
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "missing.csv")


def test_dataset_one_row_per_class(tmp_path):
    p = tmp_path / "two.csv"
    p.write_text("f1,f2,f3,f4,label\n1,2,3,4,1\n0,0,0,0,-1\n")
    x, y = load_dataset(p)
    assert x.shape == (2, 4) and list(y) == [1, -1]


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true" and fmt(3) == "3" and fmt(None) == ""


def test_csv_round_trip(tmp_path):
    p = write_csv(tmp_path / "a.csv", ["x", "y"], [(1, 0.5), (2, 1 / 3)], {"k": 1})
    text = p.read_text()
    assert text.startswith("# format: xtalk-results/1\n# config: {\"k\":1}\nx,y\n")
    config, header, rows = read_csv(p)
    assert config == {"k": 1} and header == ["x", "y"] and float(rows[1][1]) == 1 / 3


def test_output_deterministic():
    rows = [(0.1, 2), (np.float64(1e-300), 3)]
    assert csv_text(["a", "b"], rows, {"z": 1, "a": 2}) == csv_text(["a", "b"], rows, {"a": 2, "z": 1})
    assert json_text({"v": np.arange(3)}, {}) == json_text({"v": [0, 1, 2]}, {})


def test_matrix_text_round_trip(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.array_equal(parse_matrix_text(matrix_text(m)), m)
    with pytest.raises(ValidationError):
        parse_matrix_text("2 2\n1,0 0,0\n")
