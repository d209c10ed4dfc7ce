"""Tool/offset intersection and processed-patch boundary assembly.

In every section plane the ball-end cuts the plane in a circle of the full
tool radius centered on the ball center (the plane passes through it). The
repaired offset polyline crosses that circle in two points; their nearest
points on the source section, mapped back to 3D, bound the patch of surface
machined within tolerance from this tool position. n planes give 2n boundary
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ComputationError, InputError
from .geom import (
    circle_segment_intersections,
    polyline_lengths,
    polyline_nearest,
    wrap_angle_positive,
)
from .mesh import SectionFrame, SectionPolyline, TriMesh, make_section_frames, plane_section
from .offsetting import (
    InterferenceReport,
    OffsetPolyline,
    detect_interference,
    offset_segments,
    repair_offset,
)

FLAG_MULTI = "multi-intersection"
FLAG_DEGENERATE = "offset-degenerate"
FLAG_CLIPPED = "window-clipped"
FLAG_FRAME_FAILED = "frame-failed"


@dataclass(frozen=True)
class ToolSpec:
    """Ball-end cutter: radius, machining tolerance and (fixed) axis."""

    radius: float
    tolerance: float
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        if self.radius <= 0.0:
            raise InputError(f"tool radius must be positive, got {self.radius}")
        if not 0.0 < self.tolerance < self.radius:
            raise InputError(
                f"tolerance must lie in (0, radius), got {self.tolerance} for radius {self.radius}")
        a = np.asarray(self.axis, dtype=float)
        n = float(np.linalg.norm(a))
        if abs(n - 1.0) > 1e-9:
            raise InputError("tool axis must be a unit vector")
        object.__setattr__(self, "axis", a / n)


@dataclass(frozen=True)
class ContactPoint:
    """Tool touching point with surface normal and ball center."""

    position: np.ndarray
    normal: np.ndarray
    ball_center: np.ndarray
    facet: int | None = None
    params: tuple[float, float] | None = None


def contact_on_mesh(mesh: TriMesh, facet: int, tool: ToolSpec,
                    point: np.ndarray | None = None) -> ContactPoint:
    """Contact at a mesh facet; defaults to the facet incenter."""
    if not 0 <= facet < mesh.n_facets:
        raise InputError(f"facet index {facet} out of range")
    P = mesh.facet_incenter(facet) if point is None else np.asarray(point, dtype=float)
    N = mesh.facet_normals[facet]
    return ContactPoint(position=P, normal=N.copy(),
                        ball_center=P + tool.radius * N, facet=facet)


def tool_section_circle(tool: ToolSpec, contact: ContactPoint,
                        frame: SectionFrame) -> tuple[np.ndarray, float]:
    """Circle cut from the ball end by the section plane: (center_uv, radius).

    The frame contains the contact normal, hence the ball center; the section
    of the spherical cap is always a full-radius circle.
    """
    rel = contact.ball_center - frame.origin
    out_of_plane = abs(float(np.dot(rel, frame.plane_normal)))
    if out_of_plane > 1e-9 * tool.radius:
        raise ComputationError(
            f"section frame does not contain the ball center (offset {out_of_plane:g})")
    center = np.array([float(np.dot(rel, frame.u_axis)), float(np.dot(rel, frame.v_axis))])
    return center, tool.radius


def contact_boundary_points(
    offset: OffsetPolyline, circle: tuple[np.ndarray, float],
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """The two offset/tool-circle crossings closest around the tool center.

    Returns (point on the lower-arc-length side, point on the higher side,
    flags). More than two crossings keep the innermost pair and flag a
    possible rear gouge; fewer than two mean the section window was too
    small.
    """
    center, radius = circle
    pts = offset.points
    lengths = polyline_lengths(pts)
    crossings: list[tuple[float, np.ndarray]] = []
    for i in range(len(pts) - 1):
        for t in circle_segment_intersections(center, radius, pts[i], pts[i + 1]):
            s = lengths[i] + t * (lengths[i + 1] - lengths[i])
            p = pts[i] + t * (pts[i + 1] - pts[i])
            if crossings and abs(s - crossings[-1][0]) < 1e-12 * (1.0 + lengths[-1]):
                continue
            crossings.append((s, p))
    iseg, tseg, dist_c = polyline_nearest(pts, center)
    if dist_c >= radius:
        raise ComputationError("offset polyline does not reach under the tool center")
    s0 = lengths[iseg] + tseg * (lengths[iseg + 1] - lengths[iseg])
    below = [c for c in crossings if c[0] < s0]
    above = [c for c in crossings if c[0] >= s0]
    if not below or not above:
        raise ComputationError(
            "tool circle crossings missing on one side; enlarge the section window_radius")
    flags = []
    if len(crossings) > 2:
        flags.append(FLAG_MULTI)
    b_lo = max(below, key=lambda c: c[0])[1]
    b_hi = min(above, key=lambda c: c[0])[1]
    return b_lo, b_hi, flags


@dataclass
class ProjectedPoint:
    position: np.ndarray    # 3D point on the mesh
    uv: np.ndarray          # 2D location on the section polyline
    facet: int
    normal: np.ndarray
    flags: list[str]


def project_boundary_point(B: np.ndarray, section: SectionPolyline) -> ProjectedPoint:
    """Nearest point of the source section to B, mapped back to 3D.

    Projection onto a terminal polyline vertex of a clipped section is
    unreliable and gets the window-clipped flag.
    """
    i, t, _ = polyline_nearest(section.points, np.asarray(B, dtype=float))
    uv = section.points[i] + t * (section.points[i + 1] - section.points[i])
    flags = []
    if not section.closed:
        at_start = i == 0 and t <= 1e-12
        at_end = i == section.n_segments - 1 and t >= 1.0 - 1e-12
        if at_start or at_end:
            flags.append(FLAG_CLIPPED)
    return ProjectedPoint(
        position=section.frame.to_world(uv),
        uv=uv,
        facet=int(section.seg_facets[i]),
        normal=section.seg_normals[i].copy(),
        flags=flags,
    )


@dataclass
class PatchBoundary:
    """2n-point boundary of the processed patch around one contact.

    Point k sits at tangent-plane angle thetas[k] = k*pi/n measured from u0;
    points k and k+n come from the same section frame and form a diameter.
    Invalid slots (failed frames) carry NaN positions and valid[k] = False.
    """

    contact: ContactPoint
    n_planes: int
    points: np.ndarray          # (2n, 3)
    normals: np.ndarray         # (2n, 3)
    thetas: np.ndarray          # (2n,)
    valid: np.ndarray           # (2n,) bool
    point_flags: list[list[str]]
    frame_flags: list[list[str]]
    frame_reports: list[InterferenceReport | None]
    u0: np.ndarray
    w0: np.ndarray
    facets: np.ndarray | None = None      # (2n,) mesh case
    params: np.ndarray | None = None      # (2n, 2) analytic case
    _loop_cache: tuple | None = field(default=None, repr=False, compare=False)

    # -- basic queries ------------------------------------------------------

    def direction_at(self, theta: float) -> np.ndarray:
        """Unit tangent-plane direction at angle theta from u0."""
        return math.cos(theta) * self.u0 + math.sin(theta) * self.w0

    def diameters(self) -> np.ndarray:
        """3D lengths of the n frame diameters (NaN where a side failed)."""
        n = self.n_planes
        out = np.full(n, np.nan)
        for i in range(n):
            if self.valid[i] and self.valid[i + n]:
                out[i] = float(np.linalg.norm(self.points[i] - self.points[i + n]))
        return out

    def all_flags(self) -> list[str]:
        bag = set()
        for fl in self.point_flags:
            bag.update(fl)
        for fl in self.frame_flags:
            bag.update(fl)
        return sorted(bag)

    # -- cyclic boundary interpolation --------------------------------------

    def _loop(self):
        """Valid boundary loop: thetas, points, cumulative arc lengths."""
        if self._loop_cache is None:
            idx = np.nonzero(self.valid)[0]
            if len(idx) < 3:
                raise ComputationError("patch boundary has fewer than 3 valid points")
            thetas = self.thetas[idx]
            pts = self.points[idx]
            seg = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
            arc = np.concatenate([[0.0], np.cumsum(seg)])  # length m+1, arc[-1] = total
            self._loop_cache = (idx, thetas, pts, arc)
        return self._loop_cache

    def arc_total(self) -> float:
        return float(self._loop()[3][-1])

    def arc_pos_of_theta(self, theta: float) -> float:
        """Arc-length position of tangent angle theta along the boundary loop."""
        idx, thetas, pts, arc = self._loop()
        th = wrap_angle_positive(theta)
        m = len(thetas)
        k = int(np.searchsorted(thetas, th, side="right")) - 1
        if k < 0:  # below the first node: wrap into the closing span
            k = m - 1
            span = 2.0 * math.pi - thetas[-1] + thetas[0]
            dth = th + 2.0 * math.pi - thetas[-1]
        elif k == m - 1:
            span = 2.0 * math.pi - thetas[-1] + thetas[0]
            dth = th - thetas[-1]
        else:
            span = thetas[k + 1] - thetas[k]
            dth = th - thetas[k]
        frac = 0.0 if span <= 0 else dth / span
        return float(arc[k] + frac * (arc[k + 1] - arc[k]))

    def theta_of_arc_pos(self, s: float) -> float:
        idx, thetas, pts, arc = self._loop()
        total = arc[-1]
        s = s % total
        k = int(np.searchsorted(arc, s, side="right")) - 1
        k = min(k, len(thetas) - 1)
        seg = arc[k + 1] - arc[k]
        frac = 0.0 if seg <= 0 else (s - arc[k]) / seg
        if k == len(thetas) - 1:
            span = 2.0 * math.pi - thetas[-1] + thetas[0]
            return wrap_angle_positive(thetas[-1] + frac * span)
        return float(thetas[k] + frac * (thetas[k + 1] - thetas[k]))

    def point_at_arc(self, s: float) -> np.ndarray:
        idx, thetas, pts, arc = self._loop()
        total = arc[-1]
        s = s % total
        k = int(np.searchsorted(arc, s, side="right")) - 1
        k = min(k, len(pts) - 1)
        seg = arc[k + 1] - arc[k]
        frac = 0.0 if seg <= 0 else (s - arc[k]) / seg
        nxt = pts[(k + 1) % len(pts)]
        return pts[k] + frac * (nxt - pts[k])

    def point_at_theta(self, theta: float) -> np.ndarray:
        return self.point_at_arc(self.arc_pos_of_theta(theta))

    def index_at_theta(self, theta: float) -> int:
        """Valid boundary index whose angle is closest to theta (cyclic)."""
        idx, thetas, _, _ = self._loop()
        th = wrap_angle_positive(theta)
        d = np.abs(np.remainder(thetas - th + math.pi, 2.0 * math.pi) - math.pi)
        return int(idx[int(np.argmin(d))])

    def interp_at_theta(self, theta: float) -> tuple[np.ndarray, int]:
        """(interpolated boundary point, nearest valid index) at theta."""
        return self.point_at_theta(theta), self.index_at_theta(theta)

    def radius_at(self, theta: float) -> float:
        return float(np.linalg.norm(self.point_at_theta(theta) - self.contact.position))

    def width_at(self, theta: float) -> float:
        """Chord length between the interpolated boundary points at theta
        and theta + pi (the patch extent across that direction)."""
        a = self.point_at_theta(theta)
        b = self.point_at_theta(theta + math.pi)
        return float(np.linalg.norm(a - b))

    def flags_near_theta(self, theta: float) -> list[str]:
        return list(self.point_flags[self.index_at_theta(theta)])


def processed_patch(mesh: TriMesh, contact: ContactPoint, tool: ToolSpec, n: int = 12,
                    seed: np.ndarray | None = None,
                    window_radius: float | None = None) -> PatchBoundary:
    """Boundary of the surface patch machined from one tool position.

    Runs section, offset, repair, tool-circle intersection and projection in
    each of the n normal planes. Individual frames may fail (flagged); the
    patch is rejected only when more than a quarter of them do.
    """
    if n < 4:
        raise InputError(f"need at least 4 section planes, got {n}")
    if contact.facet is None:
        raise InputError("mesh patch computation needs a contact with a facet index")
    if window_radius is None:
        window_radius = tool.radius + tool.tolerance + mesh.avg_edge_length
    frames = make_section_frames(contact.position, contact.normal, seed, n)
    two_n = 2 * n
    points = np.full((two_n, 3), np.nan)
    normals = np.full((two_n, 3), np.nan)
    thetas = np.array([math.pi * k / n for k in range(two_n)])
    valid = np.zeros(two_n, dtype=bool)
    facets = np.full(two_n, -1, dtype=np.int64)
    point_flags: list[list[str]] = [[] for _ in range(two_n)]
    frame_flags: list[list[str]] = [[] for _ in range(n)]
    reports: list[InterferenceReport | None] = [None] * n
    failures = 0
    for i, frame in enumerate(frames):
        try:
            section = plane_section(mesh, frame, window_radius, start_facet=contact.facet)
            raw = offset_segments(section, tool.tolerance)
            repaired = repair_offset(raw, tool.tolerance)
            reports[i] = detect_interference(repaired, section)
            frame_flags[i].extend(repaired.interference_flags)
            circle = tool_section_circle(tool, contact, frame)
            b_lo, b_hi, bflags = contact_boundary_points(repaired, circle)
            frame_flags[i].extend(bflags)
            for slot, B in ((i + n, b_lo), (i, b_hi)):
                proj = project_boundary_point(B, section)
                points[slot] = proj.position
                normals[slot] = proj.normal
                facets[slot] = proj.facet
                point_flags[slot].extend(proj.flags)
                valid[slot] = True
        except ComputationError as exc:
            failures += 1
            frame_flags[i].append(FLAG_FRAME_FAILED)
            frame_flags[i].append(f"{FLAG_FRAME_FAILED}:{exc}")
    if failures > n - math.ceil(0.75 * n):
        raise ComputationError(
            f"{failures} of {n} section frames failed; cannot assemble the patch")
    u0 = frames[0].u_axis
    return PatchBoundary(
        contact=contact, n_planes=n, points=points, normals=normals, thetas=thetas,
        valid=valid, point_flags=point_flags, frame_flags=frame_flags,
        frame_reports=reports, u0=u0, w0=np.cross(contact.normal, u0), facets=facets,
    )


def patch_record(patch: PatchBoundary, tool: ToolSpec | None = None) -> dict:
    """JSON-ready summary of a patch boundary."""
    diam = patch.diameters()
    rec: dict = {
        "contact": {
            "position": patch.contact.position.tolist(),
            "normal": patch.contact.normal.tolist(),
            "ball_center": patch.contact.ball_center.tolist(),
        },
        "n_planes": patch.n_planes,
        "projection": "nearest-in-plane",
        "diameters": [None if math.isnan(d) else float(d) for d in diam],
        "boundary": [
            {
                "theta": float(patch.thetas[k]),
                "valid": bool(patch.valid[k]),
                "position": None if not patch.valid[k] else patch.points[k].tolist(),
                "normal": None if not patch.valid[k] else patch.normals[k].tolist(),
                "flags": sorted(patch.point_flags[k]),
            }
            for k in range(2 * patch.n_planes)
        ],
        "frame_flags": [sorted(f) for f in patch.frame_flags],
        "flags": patch.all_flags(),
    }
    if patch.contact.facet is not None:
        rec["contact"]["facet"] = int(patch.contact.facet)
    if patch.contact.params is not None:
        rec["contact"]["params"] = [float(x) for x in patch.contact.params]
    if tool is not None:
        rec["tool"] = {"radius": tool.radius, "tolerance": tool.tolerance,
                       "axis": tool.axis.tolist()}
    return rec
