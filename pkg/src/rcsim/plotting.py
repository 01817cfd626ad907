"""Deterministic SVG line plots from CSV files (no timestamps, fixed viewport)."""
from __future__ import annotations

import csv

from .errors import ValidationError

WIDTH, HEIGHT = 640, 480
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def read_csv_columns(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValidationError(f"{path}: empty CSV")
        data = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name in reader.fieldnames:
                data[name].append(row[name])
    if not data or not next(iter(data.values())):
        raise ValidationError(f"{path}: no data rows")
    return data


def _to_floats(values, column):
    out = []
    for v in values:
        try:
            out.append(float(v))
        except ValueError:
            raise ValidationError(f"column {column!r} has non-numeric entry {v!r}") from None
    return out


def plot(csv_path, x: str, y_columns, out_path) -> None:
    """Render the chosen columns as polylines into an SVG file."""
    data = read_csv_columns(csv_path)
    available = sorted(data)
    if x not in data:
        raise ValidationError(f"x column {x!r} not found; available: {available}")
    missing = [c for c in y_columns if c not in data]
    if missing:
        raise ValidationError(f"columns {missing} not found; available: {available}")

    xs = _to_floats(data[x], x)
    ys = {c: _to_floats(data[c], c) for c in y_columns}

    x_lo, x_hi = min(xs), max(xs)
    y_all = [v for col in ys.values() for v in col]
    y_lo, y_hi = min(y_all), max(y_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(v):
        return MARGIN + (v - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(v):
        return HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 15}" text-anchor="middle" '
        f'font-size="14">{x}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 20}" font-size="11" '
        f'text-anchor="middle">{x_lo:.6g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 20}" font-size="11" '
        f'text-anchor="middle">{x_hi:.6g}</text>',
        f'<text x="{MARGIN - 8}" y="{HEIGHT - MARGIN}" font-size="11" '
        f'text-anchor="end">{y_lo:.6g}</text>',
        f'<text x="{MARGIN - 8}" y="{MARGIN + 4}" font-size="11" '
        f'text-anchor="end">{y_hi:.6g}</text>',
    ]
    for i, col in enumerate(y_columns):
        color = COLORS[i % len(COLORS)]
        points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys[col]))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    if len(y_columns) > 1:
        for i, col in enumerate(y_columns):
            color = COLORS[i % len(COLORS)]
            y0 = MARGIN + 16 * i
            parts.append(
                f'<line x1="{WIDTH - MARGIN - 120}" y1="{y0}" x2="{WIDTH - MARGIN - 95}" '
                f'y2="{y0}" stroke="{color}" stroke-width="1.5"/>'
            )
            parts.append(
                f'<text x="{WIDTH - MARGIN - 90}" y="{y0 + 4}" font-size="12">{col}</text>'
            )
    parts.append("</svg>")
    with open(out_path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
