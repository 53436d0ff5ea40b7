"""Minimal SVG emitter for the command line plots.

Just enough shapes for curves with error bars, colored grid cells, and
needle snapshots.  Everything is written with fixed-precision coordinates
so outputs are byte-stable, and the files are self-contained (no external
references, no stylesheets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

__all__ = ["Canvas", "Frame", "PALETTE"]

# one fixed qualitative palette; regions/curves index into it in first-seen order
PALETTE = (
    "#4477aa",
    "#ee6677",
    "#228833",
    "#ccbb44",
    "#66ccee",
    "#aa3377",
    "#bbbbbb",
    "#222255",
)


def _n(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


@dataclass
class Canvas:
    """A fixed-size drawing surface collecting SVG elements in draw order."""

    width: float
    height: float
    elements: list[str] = field(default_factory=list)

    def line(self, x1: float, y1: float, x2: float, y2: float, color: str = "#000000", width: float = 1.0) -> None:
        self.elements.append(
            f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" '
            f'stroke="{color}" stroke-width="{_n(width)}"/>'
        )

    def polyline(self, pts: Sequence[tuple[float, float]], color: str = "#000000", width: float = 1.5) -> None:
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in pts)
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{_n(width)}"/>'
        )

    def rect(self, x: float, y: float, w: float, h: float, fill: str, stroke: str = "none") -> None:
        self.elements.append(
            f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(h)}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def circle(self, cx: float, cy: float, r: float, fill: str = "#000000") -> None:
        self.elements.append(f'<circle cx="{_n(cx)}" cy="{_n(cy)}" r="{_n(r)}" fill="{fill}"/>')

    def text(self, x: float, y: float, s: str, size: float = 11.0, anchor: str = "start") -> None:
        self.elements.append(
            f'<text x="{_n(x)}" y="{_n(y)}" font-family="sans-serif" '
            f'font-size="{_n(size)}" text-anchor="{anchor}">{escape(s)}</text>'
        )

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(self.width)}" '
            f'height="{_n(self.height)}" viewBox="0 0 {_n(self.width)} {_n(self.height)}">\n'
        )
        body = "\n".join(self.elements)
        return head + body + "\n</svg>\n"


class Frame:
    """Maps data coordinates into a margined plot box on a canvas.

    Log axes take logs up front; callers pass raw data values everywhere.
    """

    def __init__(
        self,
        canvas: Canvas,
        xlim: tuple[float, float],
        ylim: tuple[float, float],
        logx: bool = False,
        logy: bool = False,
        margin: float = 54.0,
    ) -> None:
        if xlim[0] >= xlim[1] or ylim[0] >= ylim[1]:
            raise ValueError("axis limits must be increasing")
        self.canvas = canvas
        self.logx = logx
        self.logy = logy
        self.x0, self.x1 = (math.log(v) for v in xlim) if logx else xlim
        self.y0, self.y1 = (math.log(v) for v in ylim) if logy else ylim
        self.margin = margin
        self.left = margin
        self.right = canvas.width - 0.45 * margin
        self.top = 0.45 * margin
        self.bottom = canvas.height - margin

    def px(self, x: float) -> float:
        v = math.log(x) if self.logx else x
        return self.left + (v - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        v = math.log(y) if self.logy else y
        return self.bottom - (v - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def axes(
        self,
        xlabel: str,
        ylabel: str,
        xticks: Sequence[float],
        yticks: Sequence[float],
        fmt: str = "g",
    ) -> None:
        c = self.canvas
        c.line(self.left, self.bottom, self.right, self.bottom)
        c.line(self.left, self.bottom, self.left, self.top)
        for t in xticks:
            x = self.px(t)
            c.line(x, self.bottom, x, self.bottom + 4)
            c.text(x, self.bottom + 16, format(t, fmt), anchor="middle")
        for t in yticks:
            y = self.py(t)
            c.line(self.left - 4, y, self.left, y)
            c.text(self.left - 7, y + 4, format(t, fmt), anchor="end")
        c.text((self.left + self.right) / 2, self.bottom + 34, xlabel, anchor="middle")
        # y label kept horizontal above the axis; rotation adds nothing here
        c.text(self.left - 7, self.top - 8, ylabel, anchor="start")

    def curve(self, pts: Sequence[tuple[float, float]], color: str, width: float = 1.5) -> None:
        self.canvas.polyline([(self.px(x), self.py(y)) for x, y in pts], color, width)

    def points(self, pts: Sequence[tuple[float, float]], color: str, r: float = 2.6) -> None:
        for x, y in pts:
            self.canvas.circle(self.px(x), self.py(y), r, color)

    def errorbars(self, pts: Sequence[tuple[float, float, float]], color: str) -> None:
        """(x, y, half_err) triples drawn as vertical I beams."""
        for x, y, e in pts:
            cx = self.px(x)
            lo, hi = self.py(y - e), self.py(y + e)
            self.canvas.line(cx, lo, cx, hi, color)
            self.canvas.line(cx - 3, lo, cx + 3, lo, color)
            self.canvas.line(cx - 3, hi, cx + 3, hi, color)

    def hline(self, y: float, color: str = "#888888", width: float = 1.0) -> None:
        yy = self.py(y)
        self.canvas.line(self.left, yy, self.right, yy, color, width)

    def cell(self, x: float, y: float, dx: float, dy: float, fill: str) -> None:
        """Filled data-space rectangle with corner (x, y) and extents (dx, dy)."""
        x0, y0 = self.px(x), self.py(y)
        x1, y1 = self.px(x + dx), self.py(y + dy)
        self.canvas.rect(min(x0, x1), min(y0, y1), abs(x1 - x0), abs(y1 - y0), fill)
