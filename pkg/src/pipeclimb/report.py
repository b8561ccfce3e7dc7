"""CSV tables, SVG line plots and plain-text reports.

Output units: angles in degrees, stiffness in N*m/deg, torque in N*m.
Everything written here is deterministic: no timestamps, fixed number
formatting, fixed colours.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import DEG
from .sweep import MuRow, SweepResult

SWEEP_COLUMNS = ("phi_deg", "k1", "k2", "k3", "k4", "tau1", "tau2", "tau3", "tau4", "feasible")
MU_COLUMNS = ("mu", "mu_lim", "k1", "k2", "k3", "k4")


def fmt(value) -> str:
    """Six significant digits; empty for missing values."""
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return ""
    if v == 0.0:
        return "0"
    return format(v, ".6g")


def sweep_rows(result: SweepResult) -> list[list[str]]:
    rows = []
    for phi, k, tau in zip(result.stations, result.stiffness_curves, result.torque_curves):
        ok = bool(np.all(np.isfinite(tau)))
        rows.append([fmt(phi / DEG)]
                    + [fmt(v * DEG) if ok else "" for v in k]
                    + [fmt(v) if ok else "" for v in tau]
                    + ["1" if ok else "0"])
    return rows


def mu_rows(rows: Sequence[MuRow]) -> list[list[str]]:
    out = []
    for r in rows:
        ks = [fmt(k * DEG) for k in r.stiffness] if r.stiffness else [""] * 4
        out.append([fmt(r.mu), fmt(r.mu_lim)] + ks)
    return out


def table_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_csv(result, path) -> Path:
    """Write a sweep result or a list of :class:`MuRow` as CSV."""
    if isinstance(result, SweepResult):
        text = table_text(SWEEP_COLUMNS, sweep_rows(result))
    else:
        text = table_text(MU_COLUMNS, mu_rows(result))
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path) -> tuple[list[str], list[list[float | None]]]:
    """Parse a table written by :func:`emit_csv`; empty cells become ``None``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(c) if c != "" else None for c in row] for row in reader]
    return header, rows


# --- SVG -------------------------------------------------------------------

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 130, 40, 60


def _nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _num(v: float) -> str:
    return format(v, ".2f").rstrip("0").rstrip(".")


def line_plot(series, xlabel: str, ylabel: str, title: str,
              note: str | None = None, reference=None) -> str:
    """Minimal SVG line chart.

    ``series`` is a list of ``(label, xs, ys)``; NaN or infinite points split
    a polyline.  ``reference`` is an optional ``(label, xs, ys)`` drawn dashed.
    """
    pts = [(x, y) for _, xs, ys in series + ([reference] if reference else [])
           for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(0.0, min(p[1] for p in pts)), max(p[1] for p in pts)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    y1 += 0.05 * (y1 - y0)
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{TOP + ph}" x2="{X:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_num(t)}</text>')
    for t in _nice_ticks(y0, y1):
        Y = sy(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{Y:.2f}" x2="{LEFT}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{format(t, ".4g")}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 15}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">{ylabel}</text>')

    def polylines(xs, ys, style):
        seg = []
        for x, y in list(zip(xs, ys)) + [(math.nan, math.nan)]:
            if math.isfinite(x) and math.isfinite(y):
                seg.append(f"{sx(x):.2f},{sy(y):.2f}")
                continue
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="2" {style.replace("stroke=", "fill=", 1)}/>')
            elif seg:
                out.append(f'<polyline fill="none" {style} points="{" ".join(seg)}"/>')
            seg = []

    legend = []
    for i, (label, xs, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        polylines(xs, ys, f'stroke="{color}" stroke-width="1.5"')
        legend.append((label, f'stroke="{color}" stroke-width="2"'))
    if reference:
        polylines(reference[1], reference[2], 'stroke="gray" stroke-dasharray="4 3"')
        legend.append((reference[0], 'stroke="gray" stroke-dasharray="4 3"'))
    lx = LEFT + pw + 15
    for i, (label, style) in enumerate(legend):
        y = TOP + 12 + 18 * i
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" {style}/>')
        out.append(f'<text x="{lx + 28}" y="{y + 4}">{label}</text>')
    if note:
        out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
                   f'font-size="16" fill="gray">{note}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_svg(result: SweepResult) -> str:
    xs = [p / DEG for p in result.stations]
    k = np.asarray(result.stiffness_curves) * DEG
    series = [(f"k{j + 1}", xs, list(k[:, j])) for j in range(4)]
    note = None if np.isfinite(k).any() else "no feasible stations"
    return line_plot(series, "station angle phi [deg]", "spring stiffness [N*m/deg]",
                     "Spring stiffness versus phi", note=note)


def mu_svg(rows: Sequence[MuRow]) -> str:
    xs = [r.mu for r in rows]
    ys = [r.mu_lim if r.mu_lim is not None else math.nan for r in rows]
    note = None if any(math.isfinite(y) for y in ys) else "no feasible stations"
    return line_plot([("mu_lim", xs, ys)], "design friction coefficient mu [-]",
                     "limiting friction mu_lim [-]", "mu versus mu_lim", note=note,
                     reference=("mu_lim = mu", xs, xs) if xs else None)


def emit_svg(result, path) -> Path:
    """Write a sweep result or a list of :class:`MuRow` as an SVG plot."""
    text = sweep_svg(result) if isinstance(result, SweepResult) else mu_svg(result)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
