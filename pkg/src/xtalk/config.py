"""Strict JSON run configuration.

Every block is optional and falls back to the defaults below. Unknown keys and
wrongly typed values are rejected with the dotted path of the offending field;
JSON syntax errors report line and column.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import AMPLITUDE_GRID, DETUNING_MAX, DETUNING_POINTS, SCAN_COUPLINGS, SCAN_SHAPES, SweepTarget
from .defense import DEFAULT_SHOTS, DEFAULT_THRESHOLD
from .dynamics import DEFAULT_SUBSTEPS, DEFAULT_TIME_STEPS, AttackConfig, CouplingSpec
from .errors import ConfigError, ValidationError
from .protocols import DEFAULT_DEGREE, DEFAULT_SPLIT_SEED, DEFAULT_TRAIN_FRACTION, ScenarioTiming
from .pulse import DEFAULT_CHIRP_RATE, DEFAULT_DETUNING, DEFAULT_DRAG_ALPHA, DEFAULT_SIGMA, PulseShape, PulseSpec

NUM = "number"
INT = "integer"
STR = "string"
BOOL = "boolean"
OPT_STR = "string or null"
NUM_LIST = "list of numbers"
STR_LIST = "list of strings"


def _pulse_schema():
    return {
        "shape": (STR, "cosine"),
        "amplitude": (NUM, 0.5),
        "detuning": (NUM, DEFAULT_DETUNING),
        "chirp_rate": (NUM, DEFAULT_CHIRP_RATE),
        "drag_alpha": (NUM, DEFAULT_DRAG_ALPHA),
        "sigma": (NUM, DEFAULT_SIGMA),
    }


SCHEMA = {
    "coupling": {
        "type_01": (STR, "ZX"),
        "type_12": (STR, "ZX"),
        "j01": (NUM, 0.5),
        "j12": (NUM, 0.5),
    },
    "pulses": {"q0": _pulse_schema(), "q1": _pulse_schema()},
    "sim": {
        "time_steps": (INT, DEFAULT_TIME_STEPS),
        "substeps": (INT, DEFAULT_SUBSTEPS),
        "aux_state": (STR, "00"),
    },
    "protocol": {
        "lambda_grid_deg": (NUM_LIST, [0.0, 90.0, 5.0]),
        "timing": (STR, "attacker-first"),
        "sqqnn_degree": (INT, DEFAULT_DEGREE),
        "sqqnn_train_fraction": (NUM, DEFAULT_TRAIN_FRACTION),
        "sqqnn_seed": (INT, DEFAULT_SPLIT_SEED),
        "dataset": (OPT_STR, None),
    },
    "defense": {
        "shots": (INT, DEFAULT_SHOTS),
        "threshold": (NUM, DEFAULT_THRESHOLD),
        "seed": (INT, 0),
    },
    "sweep": {
        "target": (STR, "driver_q1"),
        "amplitudes": (NUM_LIST, list(AMPLITUDE_GRID)),
        "detuning_start": (NUM, 0.0),
        "detuning_stop": (NUM, DETUNING_MAX),
        "detuning_points": (INT, DETUNING_POINTS),
        "detuning_shape": (STR, "cosine"),
        "scan_couplings": (STR_LIST, list(SCAN_COUPLINGS)),
        "scan_shapes": (STR_LIST, list(SCAN_SHAPES)),
    },
    "output": {
        "directory": (STR, "results"),
        "emit_svg": (BOOL, False),
    },
}


def _is_leaf(node) -> bool:
    return isinstance(node, tuple)


def _defaults(schema) -> dict:
    return {k: copy.deepcopy(v[1]) if _is_leaf(v) else _defaults(v) for k, v in schema.items()}


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_leaf(kind: str, value, path: str):
    ok = {
        NUM: _is_num,
        INT: lambda v: isinstance(v, int) and not isinstance(v, bool),
        STR: lambda v: isinstance(v, str),
        BOOL: lambda v: isinstance(v, bool),
        OPT_STR: lambda v: v is None or isinstance(v, str),
        NUM_LIST: lambda v: isinstance(v, list) and all(_is_num(x) for x in v),
        STR_LIST: lambda v: isinstance(v, list) and all(isinstance(x, str) for x in v),
    }[kind](value)
    if not ok:
        raise ConfigError(f"{path}: expected {kind}, got {json.dumps(value)}")
    if kind == NUM:
        return float(value)
    if kind == NUM_LIST:
        return [float(x) for x in value]
    return value


def _merge(schema, data, path: str) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object, got {json.dumps(data)}")
    unknown = sorted(set(data) - set(schema))
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"unknown key {where}{unknown[0]}")
    out = {}
    for key, node in schema.items():
        sub = f"{path}.{key}" if path else key
        if _is_leaf(node):
            out[key] = _check_leaf(node[0], data[key], sub) if key in data else copy.deepcopy(node[1])
        else:
            out[key] = _merge(node, data.get(key, {}), sub)
    return out


def _pulse(block: dict) -> PulseSpec:
    return PulseSpec(**block)


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Fully resolved configuration; ``data`` is the echo written into outputs."""

    data: dict

    @classmethod
    def from_dict(cls, raw: dict | None = None) -> "RunConfig":
        cfg = cls(_merge(SCHEMA, raw or {}, ""))
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path: str | Path | None) -> "RunConfig":
        if path is None:
            return cls.from_dict({})
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        return cls.from_json(text)

    @classmethod
    def defaults(cls) -> dict:
        return _defaults(SCHEMA)

    def _section(self, name: str, build):
        try:
            return build()
        except ValidationError as exc:
            raise ConfigError(f"{name}: {exc}") from None

    def validate(self) -> None:
        """Build every domain object once so bad physics fails before any run."""
        self.attack_config()
        self.lambda_grid_deg()
        self.timing()
        p = self.data["protocol"]
        if p["sqqnn_degree"] < 1:
            raise ConfigError("protocol.sqqnn_degree: must be >= 1")
        if not 0 < p["sqqnn_train_fraction"] < 1:
            raise ConfigError("protocol.sqqnn_train_fraction: must lie in (0, 1)")
        d = self.data["defense"]
        if d["shots"] < 100:
            raise ConfigError("defense.shots: must be >= 100")
        if d["threshold"] <= 0:
            raise ConfigError("defense.threshold: must be > 0")
        s = self.data["sweep"]
        self._section("sweep.target", lambda: SweepTarget.parse(s["target"]))
        self._section("sweep.detuning_shape", lambda: PulseShape.parse(s["detuning_shape"]))
        for i, shape in enumerate(s["scan_shapes"]):
            self._section(f"sweep.scan_shapes[{i}]", lambda: PulseShape.parse(shape))
        for i, c in enumerate(s["scan_couplings"]):
            self._section(f"sweep.scan_couplings[{i}]", lambda: CouplingSpec(c, c))
        amps = s["amplitudes"]
        if not amps or any(b <= a for a, b in zip(amps, amps[1:])):
            raise ConfigError("sweep.amplitudes: must be a non-empty strictly increasing list")
        if s["detuning_points"] < 2:
            raise ConfigError("sweep.detuning_points: must be >= 2")
        if not s["detuning_stop"] > s["detuning_start"]:
            raise ConfigError("sweep.detuning_stop: must exceed sweep.detuning_start")

    def attack_config(self) -> AttackConfig:
        c, pl, sim = self.data["coupling"], self.data["pulses"], self.data["sim"]
        coupling = self._section("coupling", lambda: CouplingSpec(c["type_01"], c["type_12"], c["j01"], c["j12"]))
        p0 = self._section("pulses.q0", lambda: _pulse(pl["q0"]))
        p1 = self._section("pulses.q1", lambda: _pulse(pl["q1"]))
        return self._section(
            "sim",
            lambda: AttackConfig(coupling, p0, p1, sim["aux_state"], sim["time_steps"], sim["substeps"]),
        )

    def lambda_grid_deg(self) -> list[float]:
        grid = self.data["protocol"]["lambda_grid_deg"]
        if len(grid) != 3:
            raise ConfigError("protocol.lambda_grid_deg: expected [start, stop, step]")
        return self._section("protocol.lambda_grid_deg", lambda: parse_grid(*grid))

    def timing(self) -> ScenarioTiming:
        return self._section("protocol.timing", lambda: ScenarioTiming.parse(self.data["protocol"]["timing"]))

    def detuning_grid(self) -> np.ndarray:
        s = self.data["sweep"]
        return np.linspace(s["detuning_start"], s["detuning_stop"], s["detuning_points"])

    def override(self, path: str, value) -> "RunConfig":
        """Copy with one dotted field replaced, re-validated."""
        data = copy.deepcopy(self.data)
        node = data
        *parents, leaf = path.split(".")
        for key in parents:
            node = node[key]
        node[leaf] = value
        return RunConfig.from_dict(data)


def parse_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid ``start, start + step, ..., stop``."""
    if not step > 0:
        raise ValidationError(f"grid step must be > 0, got {step}")
    if stop < start:
        raise ValidationError(f"grid stop {stop} is below start {start}")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + k * step for k in range(n + 1)]


def parse_grid_text(text: str) -> list[float]:
    """Parse ``start:stop:step`` as used on the command line."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"grid must look like start:stop:step, got {text!r}") from None
    return parse_grid(start, stop, step)
