"""Tool path stepping, side steps between paths, and path diagnostics.

A path repeats: build the processed patch at the contact, choose a moving
direction per strategy, step to the patch-boundary point in that direction,
reproject onto the target, and record diagnostics. Strategies:

- widest: perpendicular to the largest patch diameter
- bisector: bisector of the widest direction and an isophote crossing
- blended: boundary-arc blend between widest and isophote directions
- isophote-trace: follow the isophote through the contact (graph surfaces)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import DirectionOnSurface, widest_stripe_direction
from .contact import (
    FLAG_CLIPPED,
    ContactPoint,
    PatchBoundary,
    ToolSpec,
    contact_on_mesh,
    processed_patch,
)
from .errors import ComputationError, InputError
from .geom import unit, wrap_angle
from .mesh import TriMesh, project_point_to_mesh
from .planner import (
    beta,
    bisector_directions,
    blended_direction,
    inclination,
    isophote_point,
    isophote_points_on_halves,
)
from .surfaces import (
    AnalyticSurface,
    _slope_gradient,
    contact_boundary_analytic,
    contact_on_surface,
    gaussian_curvature,
    refine_projection,
)

STRATEGIES = ("widest", "bisector", "blended", "isophote-trace")


@dataclass
class ContactRecord:
    """Per-contact diagnostics along a tool path."""

    position: np.ndarray
    normal: np.ndarray
    theta_dir: float            # chosen direction angle in the patch frame
    direction: np.ndarray       # chosen unit direction in 3D
    beta: float
    inclination: float
    width: float                # stripe width across the chosen direction
    diam_max: float
    diam_min: float
    step_length: float
    theta_w: float
    theta_s: float
    residual: float
    facet: int | None = None
    params: tuple[float, float] | None = None
    gauss: float | None = None
    flags: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        rec = {
            "x": float(self.position[0]), "y": float(self.position[1]),
            "z": float(self.position[2]),
            "nx": float(self.normal[0]), "ny": float(self.normal[1]),
            "nz": float(self.normal[2]),
            "theta_q": float(self.theta_dir),
            "beta_rad": float(self.beta),
            "inclination": float(self.inclination),
            "width": float(self.width),
            "diam_max": float(self.diam_max),
            "diam_min": float(self.diam_min),
            "step_length": float(self.step_length),
            "theta_w": float(self.theta_w),
            "theta_s": float(self.theta_s),
            "residual": float(self.residual),
            "flags": sorted(self.flags),
        }
        if self.facet is not None:
            rec["facet"] = int(self.facet)
        if self.params is not None:
            rec["u"] = float(self.params[0])
            rec["v"] = float(self.params[1])
        if self.gauss is not None:
            rec["gauss"] = float(self.gauss)
        return rec


@dataclass
class ToolPath:
    records: list[ContactRecord]
    strategy: str
    stop_reason: str
    final_position: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def positions(self) -> np.ndarray:
        pts = [r.position for r in self.records]
        if self.final_position is not None:
            pts.append(self.final_position)
        return np.asarray(pts)


def patch_for(target, contact: ContactPoint, tool: ToolSpec, n: int,
              seed: np.ndarray | None = None,
              window_radius: float | None = None) -> PatchBoundary:
    """Processed patch on either backend (window_radius applies to meshes)."""
    if isinstance(target, TriMesh):
        return processed_patch(target, contact, tool, n, seed=seed,
                               window_radius=window_radius)
    if isinstance(target, AnalyticSurface):
        return contact_boundary_analytic(target, contact, tool, n, seed=seed)
    raise InputError(f"unsupported target type {type(target).__name__}")


def _reproject(target, tool: ToolSpec, X: np.ndarray, patch: PatchBoundary,
               theta: float) -> ContactPoint:
    if isinstance(target, TriMesh):
        hint = int(patch.facets[patch.index_at_theta(theta)])
        dist = float(np.linalg.norm(X - patch.contact.position)) + target.avg_edge_length
        pos, facet = project_point_to_mesh(target, X, hint, search_distance=dist)
        return contact_on_mesh(target, facet, tool, point=pos)
    start = tuple(patch.params[patch.index_at_theta(theta)])
    res = refine_projection(target, X, start)
    u, v = res.params
    u1, u2, v1, v2 = target.domain
    edge_tol = 1e-9 * target.domain_size()
    if (abs(u - u1) < edge_tol or abs(u - u2) < edge_tol
            or abs(v - v1) < edge_tol or abs(v - v2) < edge_tol):
        raise ComputationError("domain-exit")
    return contact_on_surface(target, res.params, tool)


def step(target, tool: ToolSpec, contact: ContactPoint, direction: DirectionOnSurface,
         patch: PatchBoundary, fraction: float = 1.0) -> ContactPoint:
    """Next contact: the patch-boundary point in the given direction.

    An unreliable (window-clipped) boundary point shortens the step to half
    the local patch radius along the same direction before reprojection.
    """
    theta = direction.theta
    X = patch.point_at_theta(theta)
    if FLAG_CLIPPED in patch.flags_near_theta(theta):
        X = contact.position + 0.5 * patch.radius_at(theta) * patch.direction_at(theta)
    if fraction != 1.0:
        X = contact.position + fraction * (X - contact.position)
    return _reproject(target, tool, X, patch, theta)


def _isophote_trace_direction(target, contact: ContactPoint,
                              patch: PatchBoundary) -> DirectionOnSurface:
    if not (isinstance(target, AnalyticSurface) and target.kind == "graph"):
        raise InputError("isophote-trace strategy needs an analytic graph surface")
    grad = _slope_gradient(target, contact.params[0], contact.params[1])
    nrm = float(np.hypot(grad[0], grad[1]))
    if nrm < 1e-14:
        raise ComputationError("isophote undefined (umbilic or flat point)")
    t2 = np.array([-grad[1], grad[0]]) / nrm
    t3 = t2[0] * target.du(*contact.params) + t2[1] * target.dv(*contact.params)
    t3 = unit(t3)
    theta = math.atan2(float(np.dot(t3, patch.w0)), float(np.dot(t3, patch.u0)))
    return DirectionOnSurface.at_theta(patch, theta)


def _choose_direction(target, tool: ToolSpec, contact: ContactPoint,
                      patch: PatchBoundary, strategy: str,
                      prev_direction: np.ndarray | None) -> tuple[DirectionOnSurface, dict]:
    w = widest_stripe_direction(patch)
    if prev_direction is not None and float(np.dot(w.vector, prev_direction)) < 0.0:
        w = DirectionOnSurface.at_theta(patch, w.theta + math.pi)
    axis = tool.axis
    info: dict = {"theta_w": w.theta}
    if strategy == "widest":
        s = isophote_point(patch, axis, w_theta=w.theta)
        w_idx = patch.index_at_theta(w.theta)
        info.update(theta_s=s.theta, residual=s.residual,
                    beta=beta(patch, w_idx, s.index, axis))
        return w, info
    if strategy == "blended":
        s = isophote_point(patch, axis, w_theta=w.theta)
        w_idx = patch.index_at_theta(w.theta)
        b = beta(patch, w_idx, s.index, axis)
        q = blended_direction(patch, w, s.index, b)
        if prev_direction is not None and float(np.dot(q.vector, prev_direction)) < 0.0:
            q = DirectionOnSurface.at_theta(patch, q.theta + math.pi)
        info.update(theta_s=s.theta, residual=s.residual, beta=b)
        return q, info
    if strategy == "bisector":
        s1, s2 = isophote_points_on_halves(patch, axis, w.theta)
        pair = bisector_directions(patch, w.theta, s1.theta, s2.theta)
        w_idx = patch.index_at_theta(w.theta)
        if prev_direction is None:
            cand = pair.b1 if (pair.b1.theta % (2.0 * math.pi)) < math.pi else pair.b2
        else:
            d1 = float(np.dot(pair.b1.vector, prev_direction))
            d2 = float(np.dot(pair.b2.vector, prev_direction))
            cand = pair.b1 if d1 >= d2 else pair.b2
            if float(np.dot(cand.vector, prev_direction)) < 0.0:
                cand = DirectionOnSurface.at_theta(patch, cand.theta + math.pi)
        s_best = s1 if abs(wrap_angle(s1.theta - cand.theta)) <= abs(
            wrap_angle(s2.theta - cand.theta)) else s2
        info.update(theta_s=s_best.theta, residual=s_best.residual,
                    beta=beta(patch, w_idx, s_best.index, axis),
                    degenerate_bisector=pair.degenerate)
        return cand, info
    if strategy == "isophote-trace":
        q = _isophote_trace_direction(target, contact, patch)
        if prev_direction is not None and float(np.dot(q.vector, prev_direction)) < 0.0:
            q = DirectionOnSurface.at_theta(patch, q.theta + math.pi)
        elif prev_direction is None and not 0.0 <= (q.theta % (2.0 * math.pi)) < math.pi:
            q = DirectionOnSurface.at_theta(patch, q.theta + math.pi)
        s = isophote_point(patch, axis, w_theta=q.theta)
        w_idx = patch.index_at_theta(w.theta)
        info.update(theta_s=s.theta, residual=s.residual,
                    beta=beta(patch, w_idx, s.index, axis))
        return q, info
    raise InputError(f"unknown strategy {strategy!r}; available: {', '.join(STRATEGIES)}")


def generate_path(target, tool: ToolSpec, start: ContactPoint, strategy: str,
                  n: int = 12, max_steps: int = 50, step_fraction: float = 1.0,
                  closure_fraction: float = 0.25) -> ToolPath:
    """Generate one tool path from start under the given strategy.

    Stops on max_steps, closure onto the start point, leaving the domain, or
    a failed patch (the path is then truncated with the reason recorded).
    """
    if strategy not in STRATEGIES:
        raise InputError(f"unknown strategy {strategy!r}; available: {', '.join(STRATEGIES)}")
    if not 0.0 < step_fraction <= 1.0:
        raise InputError("step fraction must lie in (0, 1]")
    records: list[ContactRecord] = []
    contact = start
    prev_direction: np.ndarray | None = None
    first_direction: np.ndarray | None = None
    stop_reason = "max-steps"
    final_position: np.ndarray | None = None
    for _ in range(max_steps):
        try:
            patch = patch_for(target, contact, tool, n)
            direction, info = _choose_direction(target, tool, contact, patch,
                                                strategy, prev_direction)
        except ComputationError as exc:
            stop_reason = f"patch-failed: {exc}"
            break
        try:
            nxt = step(target, tool, contact, direction, patch, fraction=step_fraction)
        except ComputationError as exc:
            stop_reason = "domain-exit" if "domain-exit" in str(exc) else f"step-failed: {exc}"
            break
        step_len = float(np.linalg.norm(nxt.position - contact.position))
        diam = patch.diameters()
        gauss = None
        if isinstance(target, AnalyticSurface) and contact.params is not None:
            gauss = gaussian_curvature(target, contact.params)
        records.append(ContactRecord(
            position=contact.position.copy(),
            normal=contact.normal.copy(),
            theta_dir=direction.theta % (2.0 * math.pi),
            direction=direction.vector.copy(),
            beta=float(info.get("beta", 0.0)),
            inclination=inclination(contact.normal, tool.axis),
            width=patch.width_at(direction.theta + math.pi / 2.0),
            diam_max=float(np.nanmax(diam)),
            diam_min=float(np.nanmin(diam)),
            step_length=step_len,
            theta_w=float(info.get("theta_w", direction.theta)) % (2.0 * math.pi),
            theta_s=float(info.get("theta_s", direction.theta)) % (2.0 * math.pi),
            residual=float(info.get("residual", 0.0)),
            facet=contact.facet,
            params=contact.params,
            gauss=gauss,
            flags=patch.all_flags(),
        ))
        if first_direction is None:
            first_direction = direction.vector.copy()
        prev_direction = direction.vector.copy()
        if step_len <= 0.0:
            stop_reason = "stalled"
            final_position = nxt.position.copy()
            break
        if (len(records) > 2
                and float(np.linalg.norm(nxt.position - start.position))
                < closure_fraction * step_len
                and float(np.dot(prev_direction, first_direction)) > 0.5):
            stop_reason = "closed"
            final_position = nxt.position.copy()
            break
        contact = nxt
        final_position = contact.position.copy()
    if not records:
        raise ComputationError(f"path generation produced no points ({stop_reason})")
    return ToolPath(records=records, strategy=strategy, stop_reason=stop_reason,
                    final_position=final_position,
                    metadata={"n_planes": n, "step_fraction": step_fraction})


def side_step(target, tool: ToolSpec, path: ToolPath, overlap: float,
              side: float = 1.0) -> ContactPoint:
    """Start point for the neighbouring path, offset across the widest point.

    The offset leaves from the path point of maximal stripe width,
    perpendicular to the local direction in the tangent plane, by
    (1 - overlap) times the local stripe half-width.
    """
    if not 0.0 < overlap < 1.0:
        raise InputError(f"overlap must lie strictly between 0 and 1, got {overlap}")
    if not path.records:
        raise InputError("cannot side-step from an empty path")
    rec = max(path.records, key=lambda r: r.width)
    lateral = unit(np.cross(rec.normal, rec.direction)) * (1.0 if side >= 0 else -1.0)
    dist = (1.0 - overlap) * 0.5 * rec.width
    X = rec.position + dist * lateral
    if isinstance(target, TriMesh):
        hint = rec.facet if rec.facet is not None else 0
        pos, facet = project_point_to_mesh(target, X, hint,
                                           search_distance=dist + 2 * target.avg_edge_length)
        if float(np.linalg.norm(pos - X)) > 0.5 * dist:
            raise ComputationError("surface covered in this direction")
        return contact_on_mesh(target, facet, tool, point=pos)
    res = refine_projection(target, X, rec.params)
    u, v = res.params
    u1, u2, v1, v2 = target.domain
    edge_tol = 1e-9 * target.domain_size()
    if (abs(u - u1) < edge_tol or abs(u - u2) < edge_tol
            or abs(v - v1) < edge_tol or abs(v - v2) < edge_tol
            or res.distance > 0.5 * dist):
        raise ComputationError("surface covered in this direction")
    return contact_on_surface(target, res.params, tool)


# ---------------------------------------------------------------------------
# diagnostics

@dataclass
class PathStats:
    strategy: str
    n_points: int
    incl_min: float
    incl_max: float
    incl_mean: float
    incl_range: float
    width_mean: float
    width_change_pct: float | None
    gauss_min: float | None
    gauss_max: float | None

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n_points": self.n_points,
            "incl_min": self.incl_min,
            "incl_max": self.incl_max,
            "incl_mean": self.incl_mean,
            "incl_range": self.incl_range,
            "width_mean": self.width_mean,
            "width_change_pct": self.width_change_pct,
            "gauss_min": self.gauss_min,
            "gauss_max": self.gauss_max,
        }


def stats_from_records(records: list[dict], strategy: str,
                       baseline_width: float | None = None) -> PathStats:
    """Aggregate diagnostics from plain record dicts (JSON-compatible)."""
    if not records:
        raise InputError("no records to aggregate")
    incl = [float(r["inclination"]) for r in records]
    widths = [float(r["width"]) for r in records]
    gauss = [float(r["gauss"]) for r in records if r.get("gauss") is not None]
    width_mean = sum(widths) / len(widths)
    change = None
    if baseline_width is not None and baseline_width != 0.0:
        change = (width_mean - baseline_width) / baseline_width * 100.0
    return PathStats(
        strategy=strategy,
        n_points=len(records),
        incl_min=min(incl),
        incl_max=max(incl),
        incl_mean=sum(incl) / len(incl),
        incl_range=max(incl) - min(incl),
        width_mean=width_mean,
        width_change_pct=change,
        gauss_min=min(gauss) if gauss else None,
        gauss_max=max(gauss) if gauss else None,
    )


@dataclass
class PathReport:
    baseline: PathStats
    paths: list[PathStats]

    def all_stats(self) -> list[PathStats]:
        return [self.baseline] + self.paths


def path_report(paths: list[ToolPath], baseline: ToolPath) -> PathReport:
    """Compare paths against the widest-stripe baseline from the same start."""
    base_records = [r.as_dict() for r in baseline.records]
    base = stats_from_records(base_records, baseline.strategy)
    out = []
    for p in paths:
        recs = [r.as_dict() for r in p.records]
        out.append(stats_from_records(recs, p.strategy, baseline_width=base.width_mean))
    return PathReport(baseline=base, paths=out)
