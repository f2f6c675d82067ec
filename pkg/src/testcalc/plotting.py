"""Matplotlib figures for CLI reports.

Figures go to files only; the Agg backend is forced so nothing needs a
display.  Metadata that would embed timestamps is stripped so that the
same report always produces the same bytes for PNG and SVG.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from .behaviors import RegionReport, SptModel  # noqa: E402
from .graph_core import ProgramGraph  # noqa: E402

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.titlesize": 12,
    "svg.hashsalt": "testcalc",
}

# circle centres for S, P, T and label anchors for regions 1..7
_CENTRES = {"S": (-0.6, 0.35), "P": (0.6, 0.35), "T": (0.0, -0.65)}
_RADIUS = 1.15
_REGION_XY = {
    1: (0.0, 0.02),
    2: (0.0, 0.85),
    3: (0.62, -0.38),
    4: (-0.62, -0.38),
    5: (-1.15, 0.7),
    6: (1.15, 0.7),
    7: (0.0, -1.3),
}


def _save(fig, path):
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "png"
    # drop timestamps and version strings so reruns are byte-identical
    metadata = {"png": {"Software": None}, "svg": {"Creator": None, "Date": None}}.get(fmt)
    fig.savefig(path, format=fmt, metadata=metadata, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_regions(model: SptModel, report: RegionReport, path, title: str = "Specified, programmed and tested behaviors"):
    """Three-circle diagram annotated with region numbers and member counts."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 5.4))
        colours = {"S": "#4c72b0", "P": "#dd8452", "T": "#55a868"}
        for name, centre in _CENTRES.items():
            ax.add_patch(Circle(centre, _RADIUS, facecolor=colours[name], alpha=0.18, edgecolor=colours[name], lw=2))
            dx, dy = centre
            norm = math.hypot(dx, dy) or 1.0
            ax.text(dx + dx / norm * 1.3, dy + dy / norm * 1.3, name, ha="center", va="center",
                    fontsize=14, fontweight="bold", color=colours[name])
        for k, (x, y) in _REGION_XY.items():
            ax.text(x, y, f"{k}\n({len(report[k])})", ha="center", va="center")
        ax.text(2.1, -1.9, f"8\n({len(report[8])})", ha="center", va="center")
        ax.add_patch(plt.Rectangle((-2.4, -2.25), 4.8, 4.2, fill=False, lw=1, color="0.4"))
        ax.set_xlim(-2.5, 2.5)
        ax.set_ylim(-2.35, 2.05)
        ax.set_aspect("equal")
        ax.axis("off")
        ax.set_title(f"{title}\n|U|={len(model.universe)}")
        return _save(fig, path)


def _layers(g: ProgramGraph) -> dict:
    """Breadth-first depth from the sources; nodes unreachable from any source go last."""
    depth = {}
    frontier = [n for n in g.nodes if g.in_degree(n) == 0] or list(g.nodes[:1])
    for n in frontier:
        depth[n] = 0
    while frontier:
        nxt = []
        for n in frontier:
            for s in g.successors(n):
                if s not in depth:
                    depth[s] = depth[n] + 1
                    nxt.append(s)
        frontier = nxt
    bottom = max(depth.values(), default=-1) + 1
    for n in g.nodes:
        depth.setdefault(n, bottom)
    return depth


def plot_program_graph(g: ProgramGraph, path, title: str = "Program graph"):
    """Layered top-down drawing; back edges curve to the side."""
    depth = _layers(g)
    rows: dict = {}
    for n in g.nodes:
        rows.setdefault(depth[n], []).append(n)
    pos = {}
    for d, members in rows.items():
        for i, n in enumerate(members):
            pos[n] = (i - (len(members) - 1) / 2, -d)
    with plt.rc_context(STYLE):
        width = max((len(m) for m in rows.values()), default=1)
        fig, ax = plt.subplots(figsize=(max(3.0, 1.6 * width), max(2.5, 1.1 * len(rows))))
        for src, dst in g.edges:
            (x0, y0), (x1, y1) = pos[src], pos[dst]
            if src == dst:
                ax.add_patch(Circle((x0 + 0.22, y0 + 0.1), 0.14, fill=False, lw=1))
                continue
            rad = 0.4 if y1 >= y0 else 0.0
            ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                        arrowprops=dict(arrowstyle="->", shrinkA=11, shrinkB=11, lw=1,
                                        connectionstyle=f"arc3,rad={rad}"))
            label = g.edge_labels.get((src, dst))
            if label:
                ax.text((x0 + x1) / 2, (y0 + y1) / 2, label, fontsize=8, color="0.3")
        for n, (x, y) in pos.items():
            ax.add_patch(Circle((x, y), 0.18, facecolor="white", edgecolor="black", lw=1, zorder=3))
            ax.text(x, y, str(n), ha="center", va="center", fontsize=8, zorder=4)
            if n in g.labels:
                ax.text(x + 0.22, y - 0.05, g.labels[n], fontsize=7, color="0.35", va="top")
        xs = [p[0] for p in pos.values()] or [0]
        ys = [p[1] for p in pos.values()] or [0]
        ax.set_xlim(min(xs) - 1, max(xs) + 1.5)
        ax.set_ylim(min(ys) - 0.6, max(ys) + 0.6)
        ax.set_aspect("equal")
        ax.axis("off")
        ax.set_title(title)
        return _save(fig, path)
