"""Minimal, byte-deterministic SVG plots of sweep records."""

from __future__ import annotations

from html import escape
from pathlib import Path
from typing import Sequence

from .analysis import SweepRecord
from .errors import ValidationError

WIDTH, HEIGHT = 480, 320
MARGIN = 50
_FIELDS = ("theta", "influence_norm", "accuracy", "loss")


def _f(x: float) -> str:
    return f"{x:.3f}"


def _value(rec: SweepRecord, field: str | None) -> float:
    if field is not None:
        v = getattr(rec, field)
        if v is None:
            raise ValidationError(f"record {rec.config_id} has no {field}")
        return float(v)
    for name in _FIELDS:
        v = getattr(rec, name)
        if v is not None:
            return float(v)
    raise ValidationError(f"record {rec.config_id} has no plottable value")


def _scale(lo: float, hi: float, a: float, b: float):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def _line(records, field, title) -> list[str]:
    xs = [r.swept_value for r in records]
    ys = [_value(r, field) for r in records]
    sx = _scale(min(xs), max(xs), MARGIN, WIDTH - MARGIN)
    sy = _scale(min(ys), max(ys), HEIGHT - MARGIN, MARGIN)
    points = " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in zip(xs, ys))
    x0, x1, y0, y1 = MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN
    ylabel = field or next(n for n in _FIELDS if getattr(records[0], n) is not None)
    return [
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(records[0].swept_name)}</text>',
        f'<text x="14" y="{(y0 + y1) // 2}" transform="rotate(-90 14 {(y0 + y1) // 2})" '
        f'text-anchor="middle">{escape(ylabel)}</text>',
        f'<text x="{x0}" y="{y0 + 16}" text-anchor="middle">{min(xs):.4g}</text>',
        f'<text x="{x1}" y="{y0 + 16}" text-anchor="middle">{max(xs):.4g}</text>',
        f'<text x="{x0 - 4}" y="{y0}" text-anchor="end">{min(ys):.4g}</text>',
        f'<text x="{x0 - 4}" y="{y1}" text-anchor="end">{max(ys):.4g}</text>',
        f'<polyline fill="none" stroke="#1f4e9c" stroke-width="2" points="{points}"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle">{escape(title)}</text>',
    ]


def _heatmap(records, field, title) -> list[str]:
    rows: dict[str, list[SweepRecord]] = {}
    for r in records:
        rows.setdefault(r.swept_name, []).append(r)
    vals = [_value(r, field) for r in records]
    lo, hi = min(vals), max(vals)
    n_rows = len(rows)
    n_cols = max(len(v) for v in rows.values())
    cw = (WIDTH - 2 * MARGIN) / n_cols
    ch = (HEIGHT - 2 * MARGIN) / n_rows
    out = [f'<text x="{WIDTH // 2}" y="20" text-anchor="middle">{escape(title)}</text>']
    for i, (name, recs) in enumerate(rows.items()):
        y = MARGIN + i * ch
        out.append(f'<text x="{MARGIN - 4}" y="{_f(y + ch / 2)}" text-anchor="end">{escape(name)}</text>')
        for j, r in enumerate(recs):
            v = _value(r, field)
            level = 0.0 if hi == lo else (v - lo) / (hi - lo)
            shade = int(round(255 * (1 - level)))
            out.append(
                f'<rect class="cell" x="{_f(MARGIN + j * cw)}" y="{_f(y)}" width="{_f(cw)}" height="{_f(ch)}" '
                f'fill="rgb({shade},{shade},255)"><title>{escape(r.config_id)}={v:.6g}</title></rect>'
            )
    for j, r in enumerate(next(iter(rows.values()))):
        out.append(
            f'<text x="{_f(MARGIN + (j + 0.5) * cw)}" y="{HEIGHT - MARGIN + 16}" '
            f'text-anchor="middle">{r.swept_value:.4g}</text>'
        )
    return out


def svg_text(records: Sequence[SweepRecord], kind: str = "line", field: str | None = None, title: str = "") -> str:
    """SVG document for ``records``.

    ``line`` draws one polyline of the value against ``swept_value``;
    ``heatmap`` draws one row per ``swept_name`` and one cell per record.
    """
    records = list(records)
    if not records:
        raise ValidationError("nothing to plot: no records")
    if kind == "line":
        body = _line(records, field, title)
    elif kind == "heatmap":
        body = _heatmap(records, field, title)
    else:
        raise ValidationError(f"unknown plot kind {kind!r} (expected line or heatmap)")
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def render_svg(records: Sequence[SweepRecord], kind: str, path: str | Path, field: str | None = None, title: str = "") -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_text(records, kind, field, title))
    return p
