"""Dataset ingestion and deterministic result files."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError, DimensionError, ValidationError

FORMAT_VERSION = "xtalk-results/1"
DATASET_HEADER = ["f1", "f2", "f3", "f4", "label"]


def bundled_dataset_path() -> Path:
    """Path of the bundled Iris setosa (+1) / versicolor (-1) subset."""
    return Path(str(resources.files("xtalk") / "data" / "iris_binary.csv"))


def load_dataset(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``f1,f2,f3,f4,label`` rows; returns ``(features (n, 4), labels (n,))``.

    Row numbers in error messages count the header as row 1.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"dataset file not found: {p}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise DatasetError(f"cannot read dataset {p}: {exc}") from None
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise DatasetError(f"{p}: empty dataset file")
    header = [h.strip() for h in rows[0]]
    if header != DATASET_HEADER:
        raise DatasetError(f"{p}, row 1: header must be {','.join(DATASET_HEADER)}, got {','.join(header)}")
    feats, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 5:
            raise DatasetError(f"{p}, row {lineno}: expected 5 columns, got {len(row)}")
        try:
            values = [float(c) for c in row]
        except ValueError:
            raise DatasetError(f"{p}, row {lineno}: non-numeric cell in {row}") from None
        if not all(math.isfinite(v) for v in values):
            raise DatasetError(f"{p}, row {lineno}: non-finite value")
        if values[4] not in (-1.0, 1.0):
            raise DatasetError(f"{p}, row {lineno}: label must be -1 or 1, got {row[4].strip()}")
        feats.append(values[:4])
        labels.append(int(values[4]))
    if not feats:
        raise DatasetError(f"{p}: no data rows")
    return np.array(feats, dtype=float), np.array(labels, dtype=int)


def fmt(value) -> str:
    """Deterministic cell rendering; floats use 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def config_echo(config: dict | None) -> str:
    return json.dumps(config or {}, sort_keys=True, separators=(",", ":"))


def csv_text(header: Sequence[str], rows: Iterable[Sequence], config: dict | None = None) -> str:
    lines = [f"# format: {FORMAT_VERSION}", f"# config: {config_echo(config)}", ",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence], config: dict | None = None) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(header, rows, config))
    return p


def read_csv(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of :func:`write_csv`: ``(config, header, rows)`` with cells as text."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    config: dict = {}
    body = []
    for line in lines:
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: ") :])
        elif not line.startswith("#"):
            body.append(line)
    header, *rows = (line.split(",") for line in body)
    return config, header, rows


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def json_text(result: dict, config: dict | None = None) -> str:
    doc = {"format": FORMAT_VERSION, "config": config or {}, "result": _jsonable(result)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, result: dict, config: dict | None = None) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json_text(result, config))
    return p


def complex_matrix(m: np.ndarray) -> list:
    """Nested ``[re, im]`` pairs for a complex matrix."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def matrix_text(m: np.ndarray) -> str:
    """Text form of a complex matrix: a ``rows cols`` line, then one row per line
    of whitespace-separated ``re,im`` pairs in 17-digit precision."""
    m = np.asarray(m, dtype=complex)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{fmt(z.real)},{fmt(z.imag)}" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        rows, cols = (int(v) for v in lines[0].split())
        data = [[complex(*map(float, cell.split(","))) for cell in ln.split()] for ln in lines[1:]]
    except (ValueError, IndexError, TypeError):
        raise ValidationError("malformed matrix text") from None
    if len(data) != rows or any(len(r) != cols for r in data):
        raise DimensionError(f"matrix text declares {rows}x{cols} but holds a different shape")
    return np.array(data, dtype=complex).reshape(rows, cols)


def write_matrix(path: str | Path, m: np.ndarray, config: dict | None = None) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    head = f"# format: {FORMAT_VERSION}\n# config: {config_echo(config)}\n"
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(head + matrix_text(m))
    return p
