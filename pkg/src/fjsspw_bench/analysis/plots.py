"""Plain SVG emitters for gap curves, progress traces, Nemenyi diagrams and Gantt charts.

Output depends only on the inputs (fixed float formatting, sorted iteration),
so identical data always yields identical bytes.
"""

from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence
from xml.sax.saxutils import escape

from .gaps import relative_gap
from .ranking import RankingReport

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 60


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Svg:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT, title: str = ""):
        self.width, self.height = width, height
        self.parts: list[str] = []
        if title:
            self.text(width / 2, 22, title, anchor="middle", size=15, cls="title")

    def line(self, x1, y1, x2, y2, color="#000", width=1.0, cls="", dash=""):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        c = f' class="{cls}"' if cls else ""
        self.parts.append(f'<line{c} x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                          f'stroke="{color}" stroke-width="{_f(width)}"{extra}/>')

    def polyline(self, points, color, cls="", width=1.8):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{color}" '
                          f'stroke-width="{_f(width)}"/>')

    def rect(self, x, y, w, h, fill, cls=""):
        c = f' class="{cls}"' if cls else ""
        self.parts.append(f'<rect{c} x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
                          f'fill="{fill}" stroke="#333" stroke-width="0.5"/>')

    def text(self, x, y, s, anchor="start", size=11, cls="", color="#000", rotate=None):
        c = f' class="{cls}"' if cls else ""
        r = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.parts.append(f'<text{c} x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}" '
                          f'fill="{color}"{r}>{escape(str(s))}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif">')
        body = "\n".join(self.parts)
        return f'<?xml version="1.0" encoding="UTF-8"?>\n{head}\n' \
               f'<rect width="100%" height="100%" fill="#fff"/>\n{body}\n</svg>\n'


def _empty(title: str, notice: str = "no data") -> str:
    svg = _Svg(title=title)
    svg.text(WIDTH / 2, HEIGHT / 2, notice, anchor="middle", size=14, cls="notice")
    return svg.render()


class _Axes:
    def __init__(self, svg: _Svg, x_range, y_range, log_y=False):
        self.svg = svg
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.log_y = log_y
        self.px0, self.px1 = LEFT, svg.width - RIGHT
        self.py0, self.py1 = svg.height - BOTTOM, TOP

    def x(self, v):
        span = (self.x1 - self.x0) or 1.0
        return self.px0 + (v - self.x0) / span * (self.px1 - self.px0)

    def y(self, v):
        if self.log_y:
            lo, hi = math.log10(self.y0), math.log10(self.y1)
            v = math.log10(max(v, self.y0))
        else:
            lo, hi = self.y0, self.y1
        span = (hi - lo) or 1.0
        return self.py0 + (v - lo) / span * (self.py1 - self.py0)

    def frame(self, xlabel, ylabel, xticks, yticks):
        s = self.svg
        s.line(self.px0, self.py0, self.px1, self.py0, cls="axis")
        s.line(self.px0, self.py0, self.px0, self.py1, cls="axis")
        for t in xticks:
            s.line(self.x(t), self.py0, self.x(t), self.py0 + 4)
            s.text(self.x(t), self.py0 + 17, _tick(t), anchor="middle", size=10)
        for t in yticks:
            s.line(self.px0 - 4, self.y(t), self.px0, self.y(t))
            s.text(self.px0 - 7, self.y(t) + 3, _tick(t), anchor="end", size=10)
        s.text((self.px0 + self.px1) / 2, s.height - 18, xlabel, anchor="middle", size=12)
        s.text(18, (self.py0 + self.py1) / 2, ylabel, anchor="middle", size=12, rotate=-90)

    def legend(self, names: Sequence[str]):
        for q, name in enumerate(names):
            y = TOP + 10 + 18 * q
            self.svg.line(self.px1 + 12, y, self.px1 + 32, y, color=PALETTE[q % len(PALETTE)], width=2.5)
            self.svg.text(self.px1 + 37, y + 4, name, size=11, cls="legend")


def _tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) < 1e-2 or abs(v) >= 1e4:
        return f"{v:.0e}"
    return f"{v:g}"


def _linear_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks, t = [], start
    while t <= hi + 1e-12:
        ticks.append(round(t, 10))
        t += step
    return ticks


def gap_plot(curves: Mapping[str, list[tuple[float, float]]], x_limit: Optional[float] = None,
             title: str = "Instances solved within gap") -> str:
    """Fraction of instances solved vs. relative gap, one step line per solver."""
    if not curves or all(not c for c in curves.values()):
        return _empty(title)
    max_gap = max((p[0] for c in curves.values() for p in c), default=0.0)
    x_hi = x_limit if x_limit is not None else max(max_gap * 1.05, 0.1)
    svg = _Svg(title=title)
    ax = _Axes(svg, (0.0, x_hi), (0.0, 1.0))
    ax.frame("relative gap", "fraction of instances", _linear_ticks(0.0, x_hi), [0, 0.25, 0.5, 0.75, 1.0])
    names = list(curves)
    for q, name in enumerate(names):
        pts, prev = [], 0.0
        for g, frac in curves[name]:
            if g > x_hi:
                break
            pts.append((ax.x(g), ax.y(prev)))
            pts.append((ax.x(g), ax.y(frac)))
            prev = frac
        pts.append((ax.x(x_hi), ax.y(prev)))
        if len(pts) == 1:
            pts.insert(0, (ax.x(0.0), ax.y(0.0)))
        svg.polyline(pts, PALETTE[q % len(PALETTE)], cls="curve")
    ax.legend(names)
    return svg.render()


def progress_plot(traces: Mapping[str, Sequence[tuple[float, float]]], reference: Optional[float] = None,
                  threshold: Optional[float] = None, log_y: bool = False, x_limit: Optional[float] = None,
                  title: str = "Progress", floor: float = 1e-4) -> str:
    """Relative gap of the best-so-far value over time for each solver.

    ``reference`` defaults to the best value in any trace. Traces start at
    their first feasible point. With ``threshold`` a horizontal target line is
    drawn and each curve stops once it reaches the target.
    """
    traces = {k: list(v) for k, v in traces.items() if v}
    if not traces:
        return _empty(title)
    if reference is None:
        reference = min(v for tr in traces.values() for _, v in tr)
    series = {}
    for name, tr in traces.items():
        pts = []
        for t, v in tr:
            gap = relative_gap(v, reference)
            pts.append((t, gap))
            if threshold is not None and gap <= threshold:
                break
        series[name] = pts
    t_max = max(t for pts in series.values() for t, _ in pts)
    x_hi = x_limit if x_limit is not None else (t_max * 1.05 if t_max > 0 else 1.0)
    g_max = max(g for pts in series.values() for _, g in pts)
    if threshold is not None:
        g_max = max(g_max, threshold)
    if log_y:
        y_range = (floor, max(g_max * 1.5, floor * 10))
        yticks = [10.0 ** e for e in range(math.ceil(math.log10(y_range[0])), math.floor(math.log10(y_range[1])) + 1)]
    else:
        y_range = (0.0, max(g_max * 1.05, 0.01))
        yticks = _linear_ticks(*y_range)
    svg = _Svg(title=title)
    ax = _Axes(svg, (0.0, x_hi), y_range, log_y=log_y)
    ax.frame("time [s]", "relative gap", _linear_ticks(0.0, x_hi), yticks)
    if threshold is not None:
        svg.line(ax.px0, ax.y(threshold), ax.px1, ax.y(threshold), color="#e00000", width=2.0, cls="threshold")
    names = list(series)
    for q, name in enumerate(names):
        pts = []
        prev = None
        for t, g in series[name]:
            if t > x_hi:
                break
            if prev is not None:
                pts.append((ax.x(t), ax.y(prev)))
            pts.append((ax.x(t), ax.y(g)))
            prev = g
        if prev is not None and threshold is None:
            pts.append((ax.x(x_hi), ax.y(prev)))
        svg.polyline(pts, PALETTE[q % len(PALETTE)], cls="curve")
    ax.legend(names)
    return svg.render()


def nemenyi_diagram(report: RankingReport, title: str = "Nemenyi diagram") -> str:
    """Critical-difference diagram; rank axis runs from k (left) to 1 (right)."""
    ranks = report.average_ranks
    if not ranks:
        return _empty(title)
    k = len(ranks)
    order = sorted(ranks, key=lambda s: (-ranks[s], s))  # inferior first
    height = 170 + 22 * k
    svg = _Svg(WIDTH, height, title=title)
    x_left, x_right, axis_y = 90, WIDTH - 90, 90

    def rx(r):
        return x_left + (k - r) / max(k - 1, 1) * (x_right - x_left)

    svg.line(x_left, axis_y, x_right, axis_y, cls="rank-axis")
    for r in range(1, k + 1):
        svg.line(rx(r), axis_y - 5, rx(r), axis_y, cls="rank-tick")
        svg.text(rx(r), axis_y - 9, r, anchor="middle", size=11)
    cd_y = 52
    svg.line(x_left, cd_y, x_left + report.critical_distance / max(k - 1, 1) * (x_right - x_left), cd_y,
             width=2.0, cls="cd-bar")
    svg.text(x_left, cd_y - 6, f"CD = {report.critical_distance:.3f}", size=11, cls="cd-label")
    svg.text(x_right, cd_y - 6, f"Friedman p = {report.p_value:.3g}", anchor="end", size=11, cls="p-value")
    half = (k + 1) // 2
    for q, name in enumerate(order):
        x = rx(ranks[name])
        if q < half:
            y = axis_y + 40 + 20 * q
            svg.line(x, axis_y, x, y, width=0.8)
            svg.line(x, y, x_left - 5, y, width=0.8)
            svg.text(x_left - 8, y + 4, f"{name} ({ranks[name]:.2f})", anchor="end", cls="solver-label")
        else:
            y = axis_y + 40 + 20 * (k - 1 - q)
            svg.line(x, axis_y, x, y, width=0.8)
            svg.line(x, y, x_right + 5, y, width=0.8)
            svg.text(x_right + 8, y + 4, f"{name} ({ranks[name]:.2f})", cls="solver-label")
    for q, group in enumerate(report.groups):
        xs = [rx(ranks[s]) for s in group]
        y = axis_y + 12 + 7 * q
        svg.line(min(xs) - 3, y, max(xs) + 3, y, width=3.0, cls="group-bar")
    return svg.render()


def gantt_chart(schedule, title: str = "Schedule") -> str:
    """Rows are machines, colours are jobs, the worker id is printed in each bar."""
    if not schedule.start:
        return _empty(title)
    lines = schedule.machine_timelines()
    machines = sorted(lines)
    row_h = 28
    height = TOP + BOTTOM + row_h * len(machines)
    svg = _Svg(WIDTH, height, title=title)
    span = schedule.makespan or 1
    x0, x1 = LEFT, WIDTH - 30

    def sx(t):
        return x0 + t / span * (x1 - x0)

    for r, k in enumerate(machines):
        y = TOP + r * row_h
        svg.text(x0 - 8, y + row_h / 2 + 4, f"M{k}", anchor="end", size=11)
        for start, end, p in lines[k]:
            job = schedule.job[p]
            svg.rect(sx(start), y + 3, sx(end) - sx(start), row_h - 6, PALETTE[(job - 1) % len(PALETTE)], cls="bar")
            label = f"J{job}.{schedule.op[p]}"
            if schedule.worker[p] is not None:
                label += f" W{schedule.worker[p]}"
            svg.text((sx(start) + sx(end)) / 2, y + row_h / 2 + 4, label, anchor="middle", size=9, color="#fff")
    axis_y = TOP + row_h * len(machines) + 4
    svg.line(x0, axis_y, x1, axis_y)
    for t in _linear_ticks(0, span):
        svg.text(sx(t), axis_y + 15, _tick(t), anchor="middle", size=10)
    svg.text((x0 + x1) / 2, height - 12, f"makespan = {schedule.makespan}", anchor="middle", size=12)
    return svg.render()
