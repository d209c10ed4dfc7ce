"""Command-line driver: patch, path, offset and report subcommands.

Exit codes: 0 on success, 1 for computation failures, 2 for usage or input
errors. All outputs are deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config_file, resolve_start_mesh, resolve_start_params
from .contact import ToolSpec, contact_on_mesh, patch_record, tool_section_circle
from .errors import ComputationError, InputError, MillError
from .mesh import TriMesh, load_mesh, make_section_frames, plane_section
from .offsetting import detect_interference, offset_segments, repair_offset
from .pathing import ToolPath, generate_path, patch_for, side_step, stats_from_records
from .reporting import (
    round_floats,
    write_csv,
    write_json,
    write_polyline_obj,
    write_report_figures,
    write_report_tables,
    write_section_svg,
)
from .surfaces import AnalyticSurface, contact_on_surface, make_surface, trace_isophote

PATH_CSV_COLUMNS = ["x", "y", "z", "theta_q", "beta_rad", "inclination", "width", "flags"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="millpath",
        description="Ball-end milling tool-path simulation on meshes and analytic surfaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key = value run file (flags override it)")
        p.add_argument("--input", help="mesh file (STL ascii/binary or OBJ)")
        p.add_argument("--format", choices=["stl-ascii", "stl-binary", "obj"],
                       help="mesh format (inferred from the file by default)")
        p.add_argument("--surface", help="built-in analytic surface name")
        p.add_argument("--surface-param", action="append", default=[],
                       metavar="NAME=VALUE", help="analytic surface parameter")
        p.add_argument("--tool-radius", type=float, help="ball-end radius")
        p.add_argument("--tolerance", type=float, help="machining tolerance (offset distance)")
        p.add_argument("--planes", type=int, help="number of section planes")
        p.add_argument("--start", help="start facet index (mesh) or 'u,v' (surface)")
        p.add_argument("--window-radius", type=float, help="section traversal window")
        p.add_argument("--out", help="output directory")
        p.add_argument("--svg", action="store_true", default=None,
                       help="emit per-frame section SVG files")
        p.add_argument("--svg-scale", type=float, help="SVG pixels per model unit")

    p_patch = sub.add_parser("patch", help="compute one processed patch")
    add_common(p_patch)

    p_path = sub.add_parser("path", help="generate tool paths")
    add_common(p_path)
    p_path.add_argument("--strategy",
                        choices=["widest", "bisector", "blended", "isophote-trace"])
    p_path.add_argument("--steps", type=int, help="maximum steps per path")
    p_path.add_argument("--step-fraction", type=float, help="step length fraction (0, 1]")
    p_path.add_argument("--overlap", type=float, help="side-step overlap fraction (0, 1)")
    p_path.add_argument("--paths", type=int, help="number of side-stepped paths")
    p_path.add_argument("--trace-step", type=float, help="isophote trace arc step")
    p_path.add_argument("--trace-count", type=int, help="isophote trace point count")

    p_off = sub.add_parser("offset", help="per-frame offset debug output")
    add_common(p_off)

    p_rep = sub.add_parser("report", help="aggregate diagnostics from path JSON files")
    p_rep.add_argument("--inputs", nargs="+", default=[], help="path_*.json files")
    p_rep.add_argument("--out", help="output directory")
    return parser


_FLAG_TO_ATTR = {
    "input": "input_path",
    "format": "mesh_format",
    "surface": "surface",
    "tool_radius": "tool_radius",
    "tolerance": "tolerance",
    "planes": "planes",
    "start": "start",
    "window_radius": "window_radius",
    "out": "out_dir",
    "svg": "svg",
    "svg_scale": "svg_scale",
    "strategy": "strategy",
    "steps": "steps",
    "step_fraction": "step_fraction",
    "overlap": "overlap",
    "paths": "paths",
    "trace_step": "trace_step",
    "trace_count": "trace_count",
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: dict = {}
    if getattr(args, "config", None):
        overrides.update(load_config_file(args.config))
    for flag, attr in _FLAG_TO_ATTR.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[attr] = value
    for spec in getattr(args, "surface_param", []) or []:
        if "=" not in spec:
            raise InputError(f"--surface-param needs NAME=VALUE, got {spec!r}")
        name, value = spec.split("=", 1)
        overrides.setdefault("surface_params", {})
        overrides["surface_params"] = dict(overrides["surface_params"])
        try:
            overrides["surface_params"][name.strip()] = float(value)
        except ValueError as exc:
            raise InputError(f"--surface-param value must be numeric: {spec!r}") from exc
    config = RunConfig(**overrides)
    config.validate()
    return config


def load_target(config: RunConfig):
    if config.input_path is not None:
        return load_mesh(config.input_path, config.mesh_format)
    return make_surface(config.surface, **config.surface_params)


def central_facet(mesh: TriMesh) -> int:
    """Deterministic default contact: facet whose incenter is nearest the
    mean of all incenters."""
    centers = np.array([mesh.facet_incenter(j) for j in range(mesh.n_facets)])
    mean = centers.mean(axis=0)
    return int(np.argmin(np.linalg.norm(centers - mean, axis=1)))


def make_start_contact(target, config: RunConfig, tool: ToolSpec):
    if isinstance(target, TriMesh):
        facet = resolve_start_mesh(config.start)
        if facet is None:
            facet = central_facet(target)
        return contact_on_mesh(target, facet, tool)
    params = resolve_start_params(config.start)
    if params is None:
        u1, u2, v1, v2 = target.domain
        params = (0.5 * (u1 + u2), 0.5 * (v1 + v2))
    return contact_on_surface(target, params, tool)


def _prepare_out(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "run_config.json", config.as_dict())
    return out


def _emit_frame_svgs(mesh: TriMesh, contact, tool: ToolSpec, config: RunConfig,
                     out: Path, with_circle: bool) -> list[dict]:
    """Recompute sections per frame and write SVG + interference summaries."""
    window = config.window_radius
    if window is None:
        window = tool.radius + tool.tolerance + mesh.avg_edge_length
    frames = make_section_frames(contact.position, contact.normal, None, config.planes)
    reports = []
    for frame in frames:
        entry: dict = {"frame": frame.index}
        try:
            section = plane_section(mesh, frame, window, start_facet=contact.facet)
            raw = offset_segments(section, tool.tolerance)
            repaired = repair_offset(raw, tool.tolerance)
            report = detect_interference(repaired, section)
            entry.update(report.as_dict())
            circle = tool_section_circle(tool, contact, frame) if with_circle else None
            write_section_svg(out / f"frame_{frame.index:02d}.svg", section, raw,
                              repaired, circle=circle, scale=config.svg_scale)
        except ComputationError as exc:
            entry["error"] = str(exc)
        reports.append(entry)
    return reports


def cmd_patch(config: RunConfig) -> int:
    target = load_target(config)
    tool = ToolSpec(config.tool_radius, config.tolerance, np.asarray(config.axis, dtype=float))
    contact = make_start_contact(target, config, tool)
    out = _prepare_out(config)
    if isinstance(target, TriMesh):
        patch = patch_for(target, contact, tool, config.planes)
    else:
        patch = patch_for(target, contact, tool, config.planes)
    record = patch_record(patch, tool)
    write_json(out / "patch.json", record)
    boundary = patch.points[patch.valid]
    write_polyline_obj(out / "patch_boundary.obj", boundary, closed=True)
    if config.svg:
        if isinstance(target, TriMesh):
            _emit_frame_svgs(target, contact, tool, config, out, with_circle=True)
        else:
            print("note: per-frame SVG output needs a mesh input; skipped", file=sys.stderr)
    return 0


def cmd_offset(config: RunConfig) -> int:
    target = load_target(config)
    if not isinstance(target, TriMesh):
        raise InputError("the offset command needs a mesh input")
    tool = ToolSpec(config.tool_radius, config.tolerance, np.asarray(config.axis, dtype=float))
    contact = make_start_contact(target, config, tool)
    out = _prepare_out(config)
    reports = _emit_frame_svgs(target, contact, tool, config, out, with_circle=False)
    write_json(out / "offsets.json", {"frames": reports})
    return 0


def _path_records(path: ToolPath) -> list[dict]:
    return round_floats([r.as_dict() for r in path.records])


def _write_path_files(out: Path, name: str, path: ToolPath, stats: dict) -> dict:
    records = _path_records(path)
    doc = {
        "strategy": path.strategy,
        "stop_reason": path.stop_reason,
        "metadata": path.metadata,
        "records": records,
        "stats": stats,
    }
    write_json(out / f"{name}.json", doc)
    write_polyline_obj(out / f"{name}.obj", path.positions())
    rows = []
    for r in records:
        rows.append([r["x"], r["y"], r["z"], r["theta_q"], r["beta_rad"],
                     r["inclination"], r["width"], ";".join(r["flags"])])
    write_csv(out / f"{name}.csv", PATH_CSV_COLUMNS, rows)
    return doc


def cmd_path(config: RunConfig) -> int:
    target = load_target(config)
    tool = ToolSpec(config.tool_radius, config.tolerance, np.asarray(config.axis, dtype=float))
    start = make_start_contact(target, config, tool)
    out = _prepare_out(config)

    if config.strategy == "isophote-trace" and isinstance(target, AnalyticSurface):
        if target.kind == "graph":
            step = config.trace_step
            if step is None:
                step = 0.25 * math.sqrt(
                    2.0 * tool.radius * tool.tolerance - tool.tolerance ** 2)
            params = trace_isophote(target, start.params, step, config.trace_count)
            pts = target.point(params[:, 0], params[:, 1])
            write_polyline_obj(out / "isophote_trace.obj", pts)

    paths: list[ToolPath] = []
    notes: list[str] = []
    first = generate_path(target, tool, start, config.strategy, n=config.planes,
                          max_steps=config.steps, step_fraction=config.step_fraction)
    paths.append(first)
    for k in range(1, config.paths):
        try:
            nxt_start = side_step(target, tool, paths[-1], config.overlap)
            paths.append(generate_path(target, tool, nxt_start, config.strategy,
                                       n=config.planes, max_steps=config.steps,
                                       step_fraction=config.step_fraction))
        except ComputationError as exc:
            notes.append(f"side step {k}: {exc}")
            break

    baseline: ToolPath | None = None
    if config.strategy != "widest":
        baseline = generate_path(target, tool, start, "widest", n=config.planes,
                                 max_steps=config.steps, step_fraction=config.step_fraction)

    docs = []
    base_stats = None
    if baseline is not None:
        base_records = _path_records(baseline)
        base_stats = round_floats(
            stats_from_records(base_records, baseline.strategy).as_dict())
        docs.append(_write_path_files(out, "path_baseline_widest", baseline, base_stats))
    base_width = base_stats["width_mean"] if base_stats else None
    for k, p in enumerate(paths):
        records = _path_records(p)
        stats = round_floats(
            stats_from_records(records, p.strategy, baseline_width=base_width).as_dict())
        docs.append(_write_path_files(out, f"path_{k:02d}", p, stats))
    write_report_tables(out, [d["stats"] for d in docs])
    if notes:
        write_json(out / "notes.json", {"notes": notes})
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    if not args.inputs:
        raise InputError("report needs at least one path JSON file (--inputs)")
    docs = []
    for name in args.inputs:
        p = Path(name)
        if not p.is_file():
            raise InputError(f"input file not found: {p}")
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}: malformed JSON ({exc})") from exc
        if "records" not in doc or "strategy" not in doc:
            raise InputError(f"{p}: not a path record file")
        docs.append(doc)
    out = Path(args.out or "report")
    out.mkdir(parents=True, exist_ok=True)
    baseline = next((d for d in docs if d["strategy"] == "widest"), docs[0])
    base_stats = round_floats(
        stats_from_records(baseline["records"], baseline["strategy"]).as_dict())
    stats = []
    for d in docs:
        width = None if d is baseline else base_stats["width_mean"]
        stats.append(round_floats(
            stats_from_records(d["records"], d["strategy"], baseline_width=width).as_dict()))
    write_report_tables(out, stats)
    write_report_figures(out, docs)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args)
        config = config_from_args(args)
        if args.command == "patch":
            return cmd_patch(config)
        if args.command == "path":
            return cmd_path(config)
        if args.command == "offset":
            return cmd_offset(config)
        raise InputError(f"unknown command {args.command!r}")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except MillError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
