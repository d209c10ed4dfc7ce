"""Run configuration: key = value files, flag overrides, validation."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import InputError
from .pathing import STRATEGIES


@dataclass
class RunConfig:
    """Validated inputs for one CLI invocation; defaults are echoed into the
    output metadata for reproducibility."""

    input_path: str | None = None
    mesh_format: str | None = None
    surface: str | None = None
    surface_params: dict = field(default_factory=dict)
    tool_radius: float = 5.0
    tolerance: float = 0.5
    axis: tuple = (0.0, 0.0, 1.0)
    planes: int = 12
    strategy: str = "blended"
    start: str | None = None
    steps: int = 25
    step_fraction: float = 1.0
    overlap: float = 0.3
    paths: int = 1
    out_dir: str = "out"
    svg: bool = False
    svg_scale: float | None = None
    window_radius: float | None = None
    trace_step: float | None = None
    trace_count: int = 400

    def validate(self) -> None:
        if (self.input_path is None) == (self.surface is None):
            raise InputError("exactly one of --input (mesh file) or --surface must be given")
        if self.tool_radius <= 0.0:
            raise InputError("tool radius must be positive")
        if not 0.0 < self.tolerance < self.tool_radius:
            raise InputError("tolerance must lie strictly between 0 and the tool radius")
        if self.planes < 4:
            raise InputError("at least 4 section planes are required")
        if self.strategy not in STRATEGIES:
            raise InputError(
                f"unknown strategy {self.strategy!r}; choose from {', '.join(STRATEGIES)}")
        if not 0.0 < self.overlap < 1.0:
            raise InputError("overlap must lie strictly between 0 and 1")
        if not 0.0 < self.step_fraction <= 1.0:
            raise InputError("step fraction must lie in (0, 1]")
        if self.paths < 1:
            raise InputError("path count must be at least 1")
        if self.steps < 1:
            raise InputError("step count must be at least 1")
        if len(self.axis) != 3:
            raise InputError("tool axis needs three components")

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


def _parse_value(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if "," in text:
        try:
            return tuple(float(p) for p in text.split(","))
        except ValueError:
            return text
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


# config-file keys (normalized) -> RunConfig attribute
_KEY_MAP = {
    "input": "input_path",
    "format": "mesh_format",
    "surface": "surface",
    "tool_radius": "tool_radius",
    "radius": "tool_radius",
    "tolerance": "tolerance",
    "axis": "axis",
    "planes": "planes",
    "strategy": "strategy",
    "start": "start",
    "steps": "steps",
    "step_fraction": "step_fraction",
    "overlap": "overlap",
    "paths": "paths",
    "out": "out_dir",
    "out_dir": "out_dir",
    "svg": "svg",
    "svg_scale": "svg_scale",
    "window_radius": "window_radius",
    "trace_step": "trace_step",
    "trace_count": "trace_count",
}


def load_config_file(path: str | Path) -> dict:
    """Parse a key = value run file; 'surface.<name>' keys collect surface
    parameters. Returns a dict of RunConfig attribute overrides."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    out: dict = {}
    sparams: dict = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        if key.startswith("surface."):
            sparams[key.split(".", 1)[1]] = _parse_value(value)
            continue
        attr = _KEY_MAP.get(key)
        if attr is None:
            raise InputError(f"{path}:{lineno}: unknown key {key.strip()!r}")
        parsed = _parse_value(value)
        if attr == "start" and not isinstance(parsed, str):
            parsed = value.strip()
        out[attr] = parsed
    if sparams:
        out["surface_params"] = sparams
    return out


def resolve_start_mesh(start: str | None) -> int | None:
    """Facet index from a start spec, or None to use the central facet."""
    if start is None:
        return None
    try:
        return int(start.strip())
    except ValueError as exc:
        raise InputError(f"mesh start must be a facet index, got {start!r}") from exc


def resolve_start_params(start: str | None) -> tuple[float, float] | None:
    """(u, v) pair from a start spec, or None for the domain center."""
    if start is None:
        return None
    parts = [p for p in start.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 2:
        raise InputError(f"surface start must be 'u,v', got {start!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise InputError(f"surface start must be numeric 'u,v', got {start!r}") from exc
