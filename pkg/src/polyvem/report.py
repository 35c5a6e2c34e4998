"""Standalone SVG charts, CSV tables and a markdown summary."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f")
MARKERS = ("circle", "square", "diamond", "triangle")
WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 78, 150, 40, 58


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _tick_label(v: float, log: bool) -> str:
    if log:
        e = int(round(math.log10(v)))
        return f"1e{e}"
    return f"{v:.3g}"


@dataclass
class Axis:
    lo: float
    hi: float
    log: bool = False
    ticks: list = field(default_factory=list)

    @classmethod
    def fit(cls, values, log: bool, pad: float = 0.05, bounds=None) -> "Axis":
        v = np.asarray(values, dtype=float)
        v = v[np.isfinite(v)]
        if log:
            v = v[v > 0]
        if bounds is not None:
            lo, hi = bounds
        elif v.size == 0:
            lo, hi = (1.0, 10.0) if log else (0.0, 1.0)
        elif log:
            lo = 10.0 ** math.floor(math.log10(v.min()))
            hi = 10.0 ** math.ceil(math.log10(v.max()))
            if hi == lo:
                hi = lo * 10
        else:
            lo, hi = float(v.min()), float(v.max())
            span = hi - lo or max(abs(hi), 1.0)
            lo, hi = lo - pad * span, hi + pad * span
        if log:
            e0, e1 = int(round(math.log10(lo))), int(round(math.log10(hi)))
            step = max(1, math.ceil((e1 - e0) / 8))
            ticks = [10.0**e for e in range(e0, e1 + 1, step)]
        else:
            ticks = list(np.linspace(lo, hi, 6))
        return cls(lo, hi, log, ticks)

    def frac(self, v: float) -> float:
        if self.log:
            return (math.log10(v) - math.log10(self.lo)) / (math.log10(self.hi) - math.log10(self.lo))
        return (v - self.lo) / (self.hi - self.lo)


class Chart:
    """Minimal SVG canvas with one x and one y axis."""

    def __init__(self, x: Axis, y: Axis, title: str, xlabel: str, ylabel: str):
        self.x, self.y = x, y
        self.parts: list[str] = []
        self.legend: list[tuple[str, str, str]] = []
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel

    def px(self, v: float) -> float:
        return LEFT + self.x.frac(v) * (WIDTH - LEFT - RIGHT)

    def py(self, v: float) -> float:
        return HEIGHT - BOTTOM - self.y.frac(v) * (HEIGHT - TOP - BOTTOM)

    def _visible(self, xv, yv) -> bool:
        ok = math.isfinite(xv) and math.isfinite(yv)
        if ok and self.x.log:
            ok = xv > 0
        if ok and self.y.log:
            ok = yv > 0
        return ok

    def marker(self, cx: float, cy: float, kind: str, color: str, r: float = 3.5) -> str:
        if kind == "square":
            return f'<rect x="{cx - r:.2f}" y="{cy - r:.2f}" width="{2 * r:.2f}" height="{2 * r:.2f}" fill="{color}"/>'
        if kind == "diamond":
            pts = f"{cx:.2f},{cy - r:.2f} {cx + r:.2f},{cy:.2f} {cx:.2f},{cy + r:.2f} {cx - r:.2f},{cy:.2f}"
            return f'<polygon points="{pts}" fill="{color}"/>'
        if kind == "triangle":
            pts = f"{cx:.2f},{cy - r:.2f} {cx + r:.2f},{cy + r:.2f} {cx - r:.2f},{cy + r:.2f}"
            return f'<polygon points="{pts}" fill="{color}"/>'
        return f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{color}"/>'

    def series(self, xs, ys, label: str, idx: int, line: bool = True) -> None:
        color, mk = PALETTE[idx % len(PALETTE)], MARKERS[idx % len(MARKERS)]
        pts = [(self.px(a), self.py(b)) for a, b in zip(xs, ys) if self._visible(a, b)]
        if line and len(pts) > 1:
            d = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
            self.parts.append(f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        self.parts.extend(self.marker(a, b, mk, color, 3.5 if line else 2.5) for a, b in pts)
        self.legend.append((label, color, mk))

    def slope_triangle(self, x0: float, y0: float, slope: float, label: str, decades: float = 0.5) -> None:
        """Right triangle with legs along x and y; hypotenuse of log-log slope ``slope``."""
        x1 = x0 * 10**decades
        y1 = y0 * 10 ** (slope * decades)
        corner = (x1, y0) if slope < 0 else (x0, y1)
        pts = [(x0, y0), (x1, y1), corner]
        if not all(self._visible(a, b) and self.x.lo <= a <= self.x.hi and self.y.lo <= b <= self.y.hi for a, b in pts):
            return
        d = " ".join(f"{self.px(a):.2f},{self.py(b):.2f}" for a, b in pts)
        self.parts.append(f'<polygon points="{d}" fill="none" stroke="#444" stroke-width="1"/>')
        lx, ly = self.px(corner[0]) + 4, (self.py(y0) + self.py(y1)) / 2 + 4
        self.parts.append(f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="11" fill="#444">{escape(label)}</text>')

    def render(self) -> str:
        x0, x1 = LEFT, WIDTH - RIGHT
        y0, y1 = HEIGHT - BOTTOM, TOP
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.1f}" y="22" font-size="14" text-anchor="middle">{escape(self.title)}</text>',
        ]
        for t in self.x.ticks:
            p = self.px(t)
            out.append(f'<line x1="{p:.2f}" y1="{y0}" x2="{p:.2f}" y2="{y1}" stroke="#e4e4e4"/>')
            out.append(f'<text x="{p:.2f}" y="{y0 + 16}" font-size="10" text-anchor="middle">{_tick_label(t, self.x.log)}</text>')
        for t in self.y.ticks:
            p = self.py(t)
            out.append(f'<line x1="{x0}" y1="{p:.2f}" x2="{x1}" y2="{p:.2f}" stroke="#e4e4e4"/>')
            out.append(f'<text x="{x0 - 6}" y="{p + 3:.2f}" font-size="10" text-anchor="end">{_tick_label(t, self.y.log)}</text>')
        out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>')
        out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 14}" font-size="12" text-anchor="middle">{escape(self.xlabel)}</text>')
        cy = (y0 + y1) / 2
        out.append(f'<text x="16" y="{cy:.1f}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 16 {cy:.1f})">{escape(self.ylabel)}</text>')
        out.extend(self.parts)
        for i, (label, color, mk) in enumerate(self.legend):
            ly = TOP + 12 + 18 * i
            out.append(self.marker(x1 + 16, ly - 4, mk, color))
            out.append(f'<text x="{x1 + 26}" y="{ly}" font-size="11">{escape(label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.render(), encoding="utf-8")
        return path


# charts ---------------------------------------------------------------------

def convergence_plot(path, series: dict, title: str, ylabel: str, rates=()) -> Path:
    """Error against DOF count on log-log axes.

    ``series`` maps a label to (dofs, errors). For each rate r in ``rates``
    a triangle of slope -r/2 is drawn (an h^r rate in two dimensions).
    """
    xs = np.concatenate([np.asarray(v[0], float) for v in series.values()]) if series else np.array([1.0])
    ys = np.concatenate([np.asarray(v[1], float) for v in series.values()]) if series else np.array([1.0])
    ch = Chart(Axis.fit(xs, True), Axis.fit(ys, True), title, "degrees of freedom", ylabel)
    for i, (label, (dx, dy)) in enumerate(series.items()):
        ch.series(dx, dy, label, i)
    ok = np.isfinite(ys) & (ys > 0)
    if ok.any():
        xa = 10 ** (0.5 * (math.log10(ch.x.lo) + math.log10(ch.x.hi)))
        ya = float(ys[ok].min()) * 1.5
        for j, r in enumerate(rates):
            drop = 10 ** (0.4 * r / 2.0)
            # keep the lower vertex above the axis floor and the upper one below the ceiling
            y0 = min(max(ya * 10 ** (0.8 * j), ch.y.lo * 1.2 * drop), ch.y.hi / 1.2)
            ch.slope_triangle(xa * 10 ** (0.2 * j), y0, -r / 2.0, str(r), decades=0.4)
    return ch.save(path)


def trend_plot(path, series: dict, title: str, ylabel: str, bounds=(0.0, 1.0)) -> Path:
    """Value against refinement level on linear axes."""
    levels = [lv for v in series.values() for lv in v[0]] or [0, 1]
    ch = Chart(Axis.fit(levels, False), Axis.fit([], False, bounds=bounds), title, "level", ylabel)
    ch.x.ticks = sorted(set(int(v) for v in levels))
    ch.y.ticks = list(np.linspace(bounds[0], bounds[1], 6))
    for i, (label, (lv, val)) in enumerate(series.items()):
        ch.series(lv, val, label, i)
    return ch.save(path)


def scatter_plot(path, x, y, title: str, xlabel: str, ylabel: str, logx: bool = False, logy: bool = True) -> Path:
    ch = Chart(Axis.fit(x, logx), Axis.fit(y, logy), title, xlabel, ylabel)
    ch.series(list(map(float, x)), list(map(float, y)), "meshes", 0, line=False)
    return ch.save(path)


# tables ---------------------------------------------------------------------

def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


DIAGNOSTIC_COLUMNS = ("dataset", "level", "k", "log10_condG", "log10_condH", "log10_piN_disc", "log10_pi0_disc")


def diagnostics_table(path, solve_rows) -> Path:
    """Per-(dataset, level, k) projector and basis diagnostics in log10 form."""
    rows = [[r[c] for c in DIAGNOSTIC_COLUMNS] for r in solve_rows]
    return write_csv(path, DIAGNOSTIC_COLUMNS, rows)


def markdown_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines)


def fitted_slope(h, err) -> float:
    """Least-squares slope of log(err) against log(h)."""
    h, err = np.asarray(h, float), np.asarray(err, float)
    ok = (h > 0) & (err > 0) & np.isfinite(err)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(h[ok]), np.log(err[ok]), 1)[0])
