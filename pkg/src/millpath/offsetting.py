"""Per-section-plane offset polylines: displacement, gap filling, trimming.

Each mesh segment cut by a section plane is translated within the plane by
the in-plane projection of epsilon times its facet normal, so the in-plane
displacement is epsilon * cos(alpha) with alpha the angle between the facet
normal and the plane. Convex junctions leave gaps that are filled with
circular arcs around the shared source vertex; concave junctions overlap and
are trimmed back to the intersection of the neighbouring offset lines. A
final sweep removes any remaining self-intersections.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ComputationError
from .geom import cross2, line_line_intersection_2d
from .mesh import SectionPolyline

log = logging.getLogger(__name__)

# Fill arcs are sampled at most this many degrees apart.
ARC_STEP_DEG = 5.0
# Facets whose normal is within this angle (radians) of the plane normal are
# skipped: their offset leaves the section plane.
SKIP_NORMAL_ANGLE = 1e-6
# Source turns with |cross| below this are treated as straight.
STRAIGHT_CROSS_TOL = 1e-12


@dataclass
class RawOffsetSegment:
    """One section segment translated by its in-plane displacement."""

    p: np.ndarray              # (2,) offset start
    q: np.ndarray              # (2,) offset end
    source_index: int
    facet: int
    displacement: np.ndarray   # (2,)
    source_p: np.ndarray | None = None
    source_q: np.ndarray | None = None


@dataclass
class RepairEvent:
    kind: str                  # gap-arc | trim | segment-removed | global-trim | join
    location: tuple[float, float]
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "u": self.location[0], "v": self.location[1],
                "detail": self.detail}


INTERFERENCE_KINDS = ("trim", "segment-removed", "global-trim")


@dataclass
class OffsetPolyline:
    """Repaired offset polyline in frame coordinates.

    provenance[i] tags the link ending at points[i] ("seg", source index),
    ("arc", junction index) or ("join", junction index); provenance[0] tags
    the first link. interference_flags is a sorted list of condition names
    ("offset-degenerate", ...).
    """

    points: np.ndarray
    provenance: list[tuple]
    repair_log: list[RepairEvent]
    interference_flags: list[str]
    epsilon: float


@dataclass
class InterferenceReport:
    frame_index: int
    events: list[RepairEvent]
    min_offset_distance: float
    flags: list[str]

    def as_dict(self) -> dict:
        return {
            "frame": self.frame_index,
            "events": [e.as_dict() for e in self.events],
            "min_offset_distance": self.min_offset_distance,
            "flags": list(self.flags),
        }


def offset_segments(section: SectionPolyline, epsilon: float) -> list[RawOffsetSegment]:
    """Translate every section segment by the in-plane part of eps * N_facet.

    Segments whose facet normal is nearly parallel to the plane normal are
    dropped with a warning; their offset direction has no in-plane content.
    """
    if epsilon <= 0.0:
        raise ComputationError("offset distance must be positive")
    frame = section.frame
    out: list[RawOffsetSegment] = []
    for i in range(section.n_segments):
        n3 = section.seg_normals[i]
        in_plane = n3 - np.dot(n3, frame.plane_normal) * frame.plane_normal
        cos_alpha = float(np.linalg.norm(in_plane))
        if cos_alpha < math.sin(SKIP_NORMAL_ANGLE):
            log.warning("segment %d (facet %d) skipped: normal parallel to section plane",
                        i, int(section.seg_facets[i]))
            continue
        disp = epsilon * np.array([float(np.dot(in_plane, frame.u_axis)),
                                   float(np.dot(in_plane, frame.v_axis))])
        sp = section.points[i]
        sq = section.points[i + 1]
        out.append(RawOffsetSegment(
            p=sp + disp, q=sq + disp, source_index=i,
            facet=int(section.seg_facets[i]), displacement=disp,
            source_p=sp.copy(), source_q=sq.copy(),
        ))
    return out


@dataclass
class _Link:
    p0: np.ndarray
    p1: np.ndarray
    prov: tuple

    def direction(self) -> np.ndarray:
        return self.p1 - self.p0

    def length(self) -> float:
        return float(np.linalg.norm(self.p1 - self.p0))


def _arc_fill(links: list[_Link], V: np.ndarray, b1: np.ndarray, junction: int,
              events: list[RepairEvent]) -> None:
    """Connect links[-1].p1 to b1 with an arc sampled around V."""
    a2 = links[-1].p1
    ra = float(np.linalg.norm(a2 - V))
    rb = float(np.linalg.norm(b1 - V))
    th_a = math.atan2(a2[1] - V[1], a2[0] - V[0])
    th_b = math.atan2(b1[1] - V[1], b1[0] - V[0])
    sweep = math.remainder(th_b - th_a, 2.0 * math.pi)
    nsteps = max(1, int(math.ceil(abs(sweep) / math.radians(ARC_STEP_DEG))))
    prev = a2
    for k in range(1, nsteps):
        t = k / nsteps
        ang = th_a + sweep * t
        rad = ra + (rb - ra) * t
        pt = V + rad * np.array([math.cos(ang), math.sin(ang)])
        links.append(_Link(prev.copy(), pt, ("arc", junction)))
        prev = pt
    links.append(_Link(prev.copy(), b1.copy(), ("arc", junction)))
    events.append(RepairEvent("gap-arc", (float(V[0]), float(V[1])),
                              f"sweep {math.degrees(sweep):.2f} deg"))


def _trim_concave(links: list[_Link], seg: _Link, junction: int,
                  events: list[RepairEvent], flags: set[str], epsilon: float) -> None:
    """Trim the chain tail against seg at a concave junction (cascading)."""
    while links:
        top = links[-1]
        res = line_line_intersection_2d(top.p0, top.direction(), seg.p0, seg.direction())
        if res is None:
            links.append(_Link(top.p1.copy(), seg.p0.copy(), ("join", junction)))
            links.append(seg)
            return
        t, s = res
        if t <= 1e-9:
            # nothing of the previous link survives
            events.append(RepairEvent("segment-removed",
                                      (float(top.p0[0]), float(top.p0[1])),
                                      "consumed by concave trimming"))
            flags.add("offset-degenerate")
            links.pop()
            if not links:
                links.append(seg)
                return
            continue
        if s >= 1.0 - 1e-9:
            events.append(RepairEvent("segment-removed",
                                      (float(seg.p1[0]), float(seg.p1[1])),
                                      "incoming segment consumed by concave trimming"))
            flags.add("offset-degenerate")
            return
        X = top.p0 + t * top.direction()
        # refuse runaway miters from nearly parallel lines
        if t > 1.0 and float(np.linalg.norm(X - top.p1)) > 2.0 * epsilon:
            links.append(_Link(top.p1.copy(), seg.p0.copy(), ("join", junction)))
            links.append(seg)
            events.append(RepairEvent("join", (float(X[0]), float(X[1])),
                                      "miter capped at concave junction"))
            return
        top.p1 = X.copy()
        seg.p0 = X.copy()
        links.append(seg)
        events.append(RepairEvent("trim", (float(X[0]), float(X[1])),
                                  "concave junction trimmed"))
        return


def _first_crossing(points: np.ndarray) -> tuple[int, int, np.ndarray] | None:
    """First pair (i, j), j >= i + 2, of crossing polyline links (vectorized).

    Touches within 1e-9 of a shared endpoint of both links do not count.
    """
    a = points[:-1]
    d = points[1:] - points[:-1]
    m = len(a)
    if m < 3:
        return None
    rel0 = a[None, :, 0] - a[:, 0, None]
    rel1 = a[None, :, 1] - a[:, 1, None]
    di0, di1 = d[:, 0][:, None], d[:, 1][:, None]
    dj0, dj1 = d[None, :, 0], d[None, :, 1]
    denom = di0 * dj1 - di1 * dj0
    scale = np.hypot(di0, di1) * np.hypot(dj0, dj1)
    ok = np.abs(denom) > 1e-12 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(ok, (rel0 * dj1 - rel1 * dj0) / denom, np.nan)
        s = np.where(ok, (rel0 * di1 - rel1 * di0) / denom, np.nan)
    e = 1e-9
    hit = (ok & (t > -e) & (t < 1 + e) & (s > -e) & (s < 1 + e)
           & (((t > e) & (t < 1 - e)) | ((s > e) & (s < 1 - e))))
    hit &= np.triu(np.ones((m, m), dtype=bool), k=2)
    if not hit.any():
        return None
    i, j = np.unravel_index(int(np.argmax(hit)), hit.shape)
    X = a[i] + t[i, j] * d[i]
    return int(i), int(j), X


def _global_sweep(links: list[_Link], events: list[RepairEvent]) -> bool:
    """Remove the first crossing between non-adjacent links; True if changed."""
    pts = np.empty((len(links) + 1, 2))
    pts[0] = links[0].p0
    for k, ln in enumerate(links):
        pts[k + 1] = ln.p1
    found = _first_crossing(pts)
    if found is None:
        return False
    i, j, X = found
    links[i].p1 = X.copy()
    links[j].p0 = X.copy()
    del links[i + 1:j]
    events.append(RepairEvent("global-trim", (float(X[0]), float(X[1])),
                              f"removed loop of {j - i - 1} link(s)"))
    return True


def repair_offset(raw: list[RawOffsetSegment], epsilon: float) -> OffsetPolyline:
    """Assemble raw offset segments into a simple polyline.

    Local pass first (arc fills at convex source vertices, line trimming at
    concave ones), then a global sweep for any remaining self-intersection.
    Applying the repair to an already repaired polyline changes nothing.
    """
    if not raw:
        raise ComputationError("no offset segments to repair")
    join_tol = 1e-9 * (1.0 + epsilon)
    events: list[RepairEvent] = []
    flags: set[str] = set()
    links: list[_Link] = [_Link(raw[0].p.copy(), raw[0].q.copy(),
                                ("seg", raw[0].source_index))]
    for i in range(1, len(raw)):
        prev, cur = raw[i - 1], raw[i]
        seg = _Link(cur.p.copy(), cur.q.copy(), ("seg", cur.source_index))
        a2 = links[-1].p1
        if float(np.linalg.norm(seg.p0 - a2)) <= join_tol:
            seg.p0 = a2.copy()
            links.append(seg)
            continue
        have_source = prev.source_q is not None and cur.source_p is not None
        contiguous = have_source and cur.source_index == prev.source_index + 1
        if not contiguous:
            links.append(_Link(a2.copy(), seg.p0.copy(), ("join", i)))
            links.append(seg)
            events.append(RepairEvent("join", (float(a2[0]), float(a2[1])),
                                      "bridged skipped segment" if have_source else "joined"))
            continue
        V = cur.source_p
        sa = prev.source_q - prev.source_p
        sb = cur.source_q - cur.source_p
        na = float(np.linalg.norm(sa))
        nb = float(np.linalg.norm(sb))
        turn = cross2(sa, sb) / (na * nb) if na > 0 and nb > 0 else 0.0
        side = cross2(sa / na, prev.displacement) if na > 0 else 0.0
        if abs(turn) < STRAIGHT_CROSS_TOL or abs(side) < 1e-15:
            links.append(_Link(a2.copy(), seg.p0.copy(), ("join", i)))
            links.append(seg)
            events.append(RepairEvent("join", (float(a2[0]), float(a2[1])),
                                      "straight junction with unequal displacement"))
            continue
        if turn * side < 0.0:
            _arc_fill(links, V, seg.p0, i, events)
            links.append(seg)
        else:
            _trim_concave(links, seg, i, events, flags, epsilon)

    links = [ln for ln in links if ln.length() > join_tol]
    if not links:
        raise ComputationError("offset repair consumed every segment")
    for _ in range(50):
        if not _global_sweep(links, events):
            break
        links = [ln for ln in links if ln.length() > join_tol]
    else:
        flags.add("offset-degenerate")
        log.warning("global sweep did not converge in 50 passes")

    points = np.empty((len(links) + 1, 2))
    provenance: list[tuple] = [links[0].prov]
    points[0] = links[0].p0
    for k, ln in enumerate(links):
        points[k + 1] = ln.p1
        provenance.append(ln.prov)
    return OffsetPolyline(points=points, provenance=provenance, repair_log=events,
                          interference_flags=sorted(flags), epsilon=epsilon)


def raw_from_polyline(points: np.ndarray) -> list[RawOffsetSegment]:
    """Wrap an existing polyline as raw segments (used to re-run the repair)."""
    pts = np.asarray(points, dtype=float)
    return [RawOffsetSegment(p=pts[i].copy(), q=pts[i + 1].copy(), source_index=i,
                             facet=-1, displacement=np.zeros(2))
            for i in range(len(pts) - 1)]


def min_distance_to_polyline(queries: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Min distance from each query point to any segment of a 2D polyline."""
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    pts = np.asarray(poly, dtype=float)
    a = pts[:-1][None, :, :]            # (1, m, 2)
    d = (pts[1:] - pts[:-1])[None, :, :]
    len2 = np.einsum("xmj,xmj->xm", d, d)
    len2 = np.where(len2 == 0.0, 1.0, len2)
    rel = q[:, None, :] - a             # (k, m, 2)
    t = np.clip(np.einsum("kmj,xmj->km", rel, d) / len2, 0.0, 1.0)
    foot = a + t[:, :, None] * d
    dist = np.linalg.norm(q[:, None, :] - foot, axis=2)
    return dist.min(axis=1)


def polyline_is_simple(points: np.ndarray) -> bool:
    """Exhaustive pairwise test that no two non-adjacent links cross."""
    return _first_crossing(np.asarray(points, dtype=float)) is None


def detect_interference(offset: OffsetPolyline, section: SectionPolyline) -> InterferenceReport:
    """Summarize repair events and offset clearance for one section frame.

    The reported minimum distance is taken over the polyline vertices, so a
    clean convex frame reports exactly the offset distance.
    """
    events = [e for e in offset.repair_log if e.kind in INTERFERENCE_KINDS]
    dists = min_distance_to_polyline(offset.points, section.points)
    return InterferenceReport(
        frame_index=section.frame.index,
        events=events,
        min_offset_distance=float(dists.min()),
        flags=list(offset.interference_flags),
    )
