"""Deterministic file emission: JSON, CSV, OBJ polylines, SVG, figures.

All floats are written at 9 significant digits and every collection in a
fixed order, so identical configurations produce byte-identical files. The
report path renders matplotlib figures next to the delimited output.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .mesh import SectionPolyline
from .offsetting import OffsetPolyline, RawOffsetSegment

FLOAT_FMT = "%.9g"


def fnum(x: float) -> str:
    return FLOAT_FMT % float(x)


def round_floats(obj):
    """Recursively round floats to 9 significant digits for stable JSON."""
    if isinstance(obj, float):
        return float(FLOAT_FMT % obj)
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, np.floating):
        return float(FLOAT_FMT % float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    return obj


def write_json(path: str | Path, obj) -> None:
    text = json.dumps(round_floats(obj), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append(fnum(cell))
            elif cell is None:
                cells.append("")
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_polyline_obj(path: str | Path, points: np.ndarray, closed: bool = False) -> None:
    pts = np.asarray(points, dtype=float)
    lines = [f"v {fnum(p[0])} {fnum(p[1])} {fnum(p[2])}" for p in pts]
    order = list(range(1, len(pts) + 1))
    if closed and len(pts) > 2:
        order.append(1)
    lines.append("l " + " ".join(str(i) for i in order))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# per-frame SVG

def _svg_path(points: np.ndarray, to_px, stroke: str, width: float = 1.2,
              dash: str | None = None) -> str:
    cmds = []
    for k, p in enumerate(points):
        x, y = to_px(p)
        cmds.append(f"{'M' if k == 0 else 'L'} {x:.2f} {y:.2f}")
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<path d="{" ".join(cmds)}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"{dash_attr}/>')


def write_section_svg(path: str | Path, section: SectionPolyline,
                      raw: list[RawOffsetSegment] | None = None,
                      repaired: OffsetPolyline | None = None,
                      circle: tuple[np.ndarray, float] | None = None,
                      scale: float | None = None, size: int = 640) -> None:
    """Debug drawing of one section frame: source, raw offsets, repaired
    offset, repair events and the tool circle, in frame (u, v) coordinates."""
    groups = [section.points]
    if raw:
        groups.extend([np.stack([r.p, r.q]) for r in raw])
    if repaired is not None:
        groups.append(repaired.points)
    if circle is not None:
        c, r = circle
        groups.append(np.array([[c[0] - r, c[1] - r], [c[0] + r, c[1] + r]]))
    allpts = np.vstack(groups)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    margin = 0.05 * size
    if scale is None:
        scale = (size - 2.0 * margin) / span
    width = (hi[0] - lo[0]) * scale + 2.0 * margin
    height = (hi[1] - lo[1]) * scale + 2.0 * margin

    def to_px(p):
        return (p[0] - lo[0]) * scale + margin, (hi[1] - p[1]) * scale + margin

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<text x="8" y="16" font-size="12" font-family="monospace">'
        f'frame {section.frame.index}  theta={math.degrees(section.frame.theta):.1f} deg  '
        f'scale={fnum(scale)} px per model unit</text>',
    ]
    if circle is not None:
        c, r = circle
        cx, cy = to_px(c)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r * scale:.2f}" '
                     f'fill="none" stroke="#2a8f2a" stroke-width="1.0"/>')
    if raw:
        for rseg in raw:
            parts.append(_svg_path(np.stack([rseg.p, rseg.q]), to_px, "#999999", 0.8, "4 3"))
    parts.append(_svg_path(section.points, to_px, "#000000", 1.4))
    if repaired is not None:
        parts.append(_svg_path(repaired.points, to_px, "#1f5fbf", 1.4))
        for ev in repaired.repair_log:
            if ev.kind in ("trim", "segment-removed", "global-trim"):
                x, y = to_px(ev.location)
                parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.0" fill="#c03030"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# report figures and tables

_PNG_META = {"Software": None}  # keep PNG output byte-stable


def write_report_tables(out_dir: Path, stats: list[dict]) -> None:
    header = ["strategy", "n_points", "incl_min", "incl_max", "incl_mean",
              "incl_range", "width_mean", "width_change_pct", "gauss_min", "gauss_max"]
    rows = [[s.get(k) for k in header] for s in stats]
    write_csv(out_dir / "report.csv", header, rows)
    lines = []
    for s in stats:
        lines.append(f"strategy {s['strategy']}: {s['n_points']} points")
        lines.append(f"  inclination [rad]: min {fnum(s['incl_min'])} "
                     f"max {fnum(s['incl_max'])} mean {fnum(s['incl_mean'])} "
                     f"range {fnum(s['incl_range'])}")
        line = f"  stripe width mean: {fnum(s['width_mean'])}"
        if s.get("width_change_pct") is not None:
            line += f"  (change vs baseline: {fnum(s['width_change_pct'])}%)"
        lines.append(line)
        if s.get("gauss_min") is not None:
            lines.append(f"  gaussian curvature range: [{fnum(s['gauss_min'])}, "
                         f"{fnum(s['gauss_max'])}]")
    Path(out_dir / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_report_figures(out_dir: Path, paths: list[dict]) -> None:
    """Per-step inclination and stripe-width figures plus an xy path plot."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for p in paths:
        incl = [r["inclination"] for r in p["records"]]
        ax.plot(range(len(incl)), incl, marker="o", markersize=3, label=p["strategy"])
    ax.set_xlabel("step")
    ax.set_ylabel("inclination angle [rad]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "fig_inclination.png", dpi=110, metadata=_PNG_META)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for p in paths:
        widths = [r["width"] for r in p["records"]]
        ax.plot(range(len(widths)), widths, marker="o", markersize=3, label=p["strategy"])
    ax.set_xlabel("step")
    ax.set_ylabel("stripe width")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "fig_width.png", dpi=110, metadata=_PNG_META)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    for p in paths:
        xs = [r["x"] for r in p["records"]]
        ys = [r["y"] for r in p["records"]]
        ax.plot(xs, ys, marker="o", markersize=3, label=p["strategy"])
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "fig_paths.png", dpi=110, metadata=_PNG_META)
    plt.close(fig)
