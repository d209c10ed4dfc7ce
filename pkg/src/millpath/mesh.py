"""Triangle-mesh container, file ingestion, adjacency and plane sectioning.

The mesh is stored index-based with an edge-oriented adjacency table:
directed edge ``3*f + k`` runs from ``triangles[f][k]`` to
``triangles[f][(k+1) % 3]`` and maps to its oppositely oriented twin in the
neighbouring facet (or -1 on the boundary). Plane sections are computed by
walking this table locally around a start facet instead of slicing the whole
mesh.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ComputationError, InputError, MeshError
from .geom import perpendicular_in_plane, unit

log = logging.getLogger(__name__)

# Vertices closer than this fraction of the bounding-box diagonal are welded.
WELD_FRACTION = 1e-7
# Signed distances in [0, +eps_geom) count as "above" the section plane, which
# removes every exactly-on-plane special case from the facet walk.
PLANE_EPS_FRACTION = 1e-9


@dataclass(frozen=True)
class TriMesh:
    """Indexed triangle mesh with per-facet normals and edge adjacency.

    Immutable after construction; safe for concurrent read-only use.
    """

    vertices: np.ndarray       # (V, 3) float64
    triangles: np.ndarray      # (F, 3) int64
    facet_normals: np.ndarray  # (F, 3) float64, unit length
    adjacency: np.ndarray      # (F, 3) int64, twin directed edge id or -1
    bbox_diag: float
    avg_edge_length: float

    @property
    def n_facets(self) -> int:
        return len(self.triangles)

    def facet_points(self, j: int) -> np.ndarray:
        return self.vertices[self.triangles[j]]

    def facet_incenter(self, j: int) -> np.ndarray:
        """Incenter of facet j; the default contact point on a facet."""
        a, b, c = self.facet_points(j)
        la = float(np.linalg.norm(b - c))
        lb = float(np.linalg.norm(c - a))
        lc = float(np.linalg.norm(a - b))
        return (la * a + lb * b + lc * c) / (la + lb + lc)

    def interior_edge_count(self) -> int:
        return int(np.count_nonzero(self.adjacency >= 0)) // 2


def facet_normal(mesh: TriMesh, j: int) -> np.ndarray:
    """Unit normal of facet j, consistent with the triangle winding."""
    if not 0 <= j < mesh.n_facets:
        raise InputError(f"facet index {j} out of range (mesh has {mesh.n_facets})")
    return mesh.facet_normals[j]


def _compute_normals(vertices: np.ndarray, triangles: np.ndarray, bbox_diag: float) -> np.ndarray:
    p = vertices[triangles]
    cross = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    norms = np.linalg.norm(cross, axis=1)
    area_floor = 1e-12 * bbox_diag * bbox_diag
    bad = np.nonzero(norms <= 2.0 * area_floor)[0]
    if len(bad):
        raise MeshError(f"degenerate facet(s) {bad[:8].tolist()} (area below {area_floor:g})")
    return cross / norms[:, None]


def _build_adjacency(triangles: np.ndarray) -> np.ndarray:
    n = len(triangles)
    directed: dict[tuple[int, int], int] = {}
    undirected_count: dict[tuple[int, int], int] = {}
    for f in range(n):
        tri = triangles[f]
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            key = (a, b)
            ukey = (min(a, b), max(a, b))
            undirected_count[ukey] = undirected_count.get(ukey, 0) + 1
            if key in directed:
                if undirected_count[ukey] > 2:
                    raise MeshError(f"non-manifold edge {ukey}: more than two facets share it")
                raise MeshError(f"inconsistently oriented facets across edge {ukey}")
            directed[key] = 3 * f + k
    for ukey, cnt in undirected_count.items():
        if cnt > 2:
            raise MeshError(f"non-manifold edge {ukey}: {cnt} facets share it")
    adjacency = np.full((n, 3), -1, dtype=np.int64)
    for (a, b), eid in directed.items():
        twin = directed.get((b, a))
        if twin is not None:
            adjacency[eid // 3, eid % 3] = twin
    return adjacency


def build_mesh(vertices: np.ndarray, triangles: np.ndarray) -> TriMesh:
    """Validate raw arrays and assemble a TriMesh (no vertex welding)."""
    vertices = np.ascontiguousarray(vertices, dtype=float)
    triangles = np.ascontiguousarray(triangles, dtype=np.int64)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MeshError("vertices must be an (n, 3) array")
    if triangles.ndim != 2 or triangles.shape[1] != 3:
        raise MeshError("triangles must be an (m, 3) array")
    if len(triangles) and (triangles.min() < 0 or triangles.max() >= len(vertices)):
        raise MeshError("triangle index out of range")
    if np.any(triangles[:, 0] == triangles[:, 1]) or np.any(triangles[:, 1] == triangles[:, 2]) \
            or np.any(triangles[:, 2] == triangles[:, 0]):
        raise MeshError("triangle with repeated vertex index")
    lo = vertices.min(axis=0)
    hi = vertices.max(axis=0)
    bbox_diag = float(np.linalg.norm(hi - lo))
    if bbox_diag == 0.0:
        raise MeshError("mesh has zero extent")
    normals = _compute_normals(vertices, triangles, bbox_diag)
    adjacency = _build_adjacency(triangles)
    p = vertices[triangles]
    edge_len = np.linalg.norm(np.roll(p, -1, axis=1) - p, axis=2)
    return TriMesh(
        vertices=vertices,
        triangles=triangles,
        facet_normals=normals,
        adjacency=adjacency,
        bbox_diag=bbox_diag,
        avg_edge_length=float(edge_len.mean()),
    )


def weld_vertices(vertices: np.ndarray, triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge vertices that coincide within WELD_FRACTION of the bbox diagonal."""
    vertices = np.asarray(vertices, dtype=float)
    lo = vertices.min(axis=0)
    hi = vertices.max(axis=0)
    diag = float(np.linalg.norm(hi - lo))
    tol = WELD_FRACTION * diag if diag > 0 else WELD_FRACTION
    keys = np.round(vertices / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    new_vertices = vertices[np.sort(first)]
    new_triangles = rank[inverse][np.asarray(triangles, dtype=np.int64)]
    return new_vertices, new_triangles


# ---------------------------------------------------------------------------
# file ingestion

def load_mesh(path: str | Path, fmt: str | None = None) -> TriMesh:
    """Load an STL (ascii or binary) or OBJ file into a TriMesh.

    fmt is one of "stl-ascii", "stl-binary", "obj" or None to infer from the
    extension (and file content for .stl). Vertices are welded, orientation
    and manifoldness are enforced, normals and adjacency are built.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    if fmt is None:
        ext = path.suffix.lower()
        if ext == ".obj":
            fmt = "obj"
        elif ext == ".stl":
            fmt = _sniff_stl(path)
        else:
            raise InputError(f"cannot infer mesh format from extension {ext!r}")
    if fmt == "obj":
        vertices, triangles = _read_obj(path)
    elif fmt == "stl-ascii":
        vertices, triangles = _read_stl_ascii(path)
    elif fmt == "stl-binary":
        vertices, triangles = _read_stl_binary(path)
    else:
        raise InputError(f"unknown mesh format {fmt!r}")
    if len(triangles) == 0:
        raise MeshError(f"{path}: no triangles")
    vertices, triangles = weld_vertices(vertices, triangles)
    try:
        return build_mesh(vertices, triangles)
    except MeshError as exc:
        raise MeshError(f"{path}: {exc}") from exc


def _sniff_stl(path: Path) -> str:
    size = path.stat().st_size
    with open(path, "rb") as fh:
        head = fh.read(512)
    if size >= 84:
        (count,) = struct.unpack("<I", head[80:84])
        if size == 84 + 50 * count:
            return "stl-binary"
    if head.lstrip().startswith(b"solid"):
        return "stl-ascii"
    return "stl-binary"


def _read_obj(path: Path) -> tuple[np.ndarray, np.ndarray]:
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise MeshError(f"{path}:{lineno}: malformed vertex record")
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    tok = tok.split("/")[0]
                    i = int(tok)
                    if i < 0:
                        i = len(vertices) + 1 + i
                    idx.append(i - 1)
                if len(idx) != 3:
                    raise MeshError(f"{path}:{lineno}: only triangular faces are supported")
                faces.append(idx)
    if not vertices:
        raise MeshError(f"{path}: no vertices")
    return np.asarray(vertices, dtype=float), np.asarray(faces, dtype=np.int64)


def _read_stl_ascii(path: Path) -> tuple[np.ndarray, np.ndarray]:
    vertices: list[list[float]] = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if parts and parts[0] == "vertex":
                if len(parts) < 4:
                    raise MeshError(f"{path}:{lineno}: malformed vertex record")
                vertices.append([float(x) for x in parts[1:4]])
    if len(vertices) == 0 or len(vertices) % 3 != 0:
        raise MeshError(f"{path}: vertex count {len(vertices)} is not a multiple of 3")
    v = np.asarray(vertices, dtype=float)
    t = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return v, t


def _read_stl_binary(path: Path) -> tuple[np.ndarray, np.ndarray]:
    data = path.read_bytes()
    if len(data) < 84:
        raise MeshError(f"{path}: truncated binary STL")
    (count,) = struct.unpack("<I", data[80:84])
    if len(data) < 84 + 50 * count:
        raise MeshError(f"{path}: binary STL shorter than declared facet count {count}")
    rec = np.frombuffer(data, dtype=np.uint8, count=50 * count, offset=84).reshape(count, 50)
    tri = rec[:, 12:48].copy().view("<f4").reshape(count, 3, 3).astype(float)
    v = tri.reshape(-1, 3)
    t = np.arange(3 * count, dtype=np.int64).reshape(-1, 3)
    return v, t


def write_obj(path: str | Path, vertices: np.ndarray, triangles: np.ndarray | None = None,
              polylines: list[np.ndarray] | None = None) -> None:
    """Debug OBJ writer: triangles as f records, polylines as l records."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in np.asarray(vertices, dtype=float):
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        if triangles is not None:
            for t in np.asarray(triangles, dtype=np.int64):
                fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
        if polylines:
            for line in polylines:
                fh.write("l " + " ".join(str(int(i) + 1) for i in line) + "\n")


# ---------------------------------------------------------------------------
# section frames and plane sections

@dataclass(frozen=True)
class SectionFrame:
    """A plane through the contact point with an embedded 2D frame.

    v_axis is aligned with the contact normal; {u_axis, v_axis, plane_normal}
    is a right-handed orthonormal triple, so the plane contains both the
    contact point and its normal direction.
    """

    origin: np.ndarray        # P
    u_axis: np.ndarray
    v_axis: np.ndarray
    plane_normal: np.ndarray
    index: int = 0
    theta: float = 0.0        # angle of u_axis in the tangent plane

    def to_plane(self, points: np.ndarray) -> np.ndarray:
        """Map world points (…, 3) to in-plane (u, v) coordinates (…, 2)."""
        rel = np.asarray(points, dtype=float) - self.origin
        return np.stack([rel @ self.u_axis, rel @ self.v_axis], axis=-1)

    def to_world(self, uv: np.ndarray) -> np.ndarray:
        uv = np.asarray(uv, dtype=float)
        return self.origin + np.multiply.outer(uv[..., 0], self.u_axis) \
            + np.multiply.outer(uv[..., 1], self.v_axis)


def make_section_frames(P: np.ndarray, N_P: np.ndarray, in_plane_seed: np.ndarray | None,
                        n: int) -> list[SectionFrame]:
    """n section planes through P and N_P, u axes equally spaced by pi/n.

    A seed parallel to N_P falls back to a deterministic axis with a warning.
    """
    if n < 2:
        raise InputError(f"need at least 2 section planes, got {n}")
    P = np.asarray(P, dtype=float)
    N = unit(np.asarray(N_P, dtype=float))
    if in_plane_seed is not None:
        s = np.asarray(in_plane_seed, dtype=float)
        t = s - np.dot(s, N) * N
        if np.linalg.norm(t) <= 1e-12 * max(1.0, float(np.linalg.norm(s))):
            log.warning("section seed parallel to the contact normal; using fallback axis")
            u0 = perpendicular_in_plane(N, None)
        else:
            u0 = unit(t)
    else:
        u0 = perpendicular_in_plane(N, None)
    w0 = np.cross(N, u0)
    frames = []
    for i in range(n):
        theta = math.pi * i / n
        u = math.cos(theta) * u0 + math.sin(theta) * w0
        m = np.cross(u, N)
        frames.append(SectionFrame(origin=P, u_axis=u, v_axis=N, plane_normal=unit(m),
                                   index=i, theta=theta))
    return frames


@dataclass
class SectionPolyline:
    """Chained plane/mesh intersection polyline in frame coordinates.

    points[i] .. points[i+1] is segment i cut from facet seg_facets[i], whose
    unit normal is seg_normals[i]. truncated_* mark window or mesh-boundary
    clipping; closed marks a full loop back to the start facet.
    """

    points: np.ndarray        # (m+1, 2)
    seg_facets: np.ndarray    # (m,) int
    seg_normals: np.ndarray   # (m, 3)
    frame: SectionFrame
    truncated_start: bool = False
    truncated_end: bool = False
    closed: bool = False

    @property
    def n_segments(self) -> int:
        return len(self.seg_facets)


def locate_facet(mesh: TriMesh, point: np.ndarray) -> int:
    """Facet whose triangle is closest to point (brute force)."""
    from .geom import closest_point_on_triangle

    point = np.asarray(point, dtype=float)
    best, best_d = -1, math.inf
    for j in range(mesh.n_facets):
        a, b, c = mesh.facet_points(j)
        d = float(np.linalg.norm(closest_point_on_triangle(point, a, b, c) - point))
        if d < best_d:
            best, best_d = j, d
    tol = max(1e-6 * mesh.bbox_diag, 0.5 * mesh.avg_edge_length)
    if best_d > tol:
        raise ComputationError(
            f"point {point.tolist()} is {best_d:g} away from the mesh (not on a facet)")
    return best


def _facet_crossing_edges(mesh: TriMesh, f: int, above: np.ndarray) -> list[int]:
    tri = mesh.triangles[f]
    out = []
    for k in range(3):
        if above[tri[k]] != above[tri[(k + 1) % 3]]:
            out.append(k)
    return out


def plane_section(mesh: TriMesh, frame: SectionFrame, window_radius: float,
                  start_facet: int | None = None) -> SectionPolyline:
    """Intersect the mesh with the frame's plane by local adjacency walking.

    The walk starts at the facet containing the frame origin and extends in
    both directions until the section leaves a disc of window_radius around
    the origin (in plane coordinates), reaches an open boundary, or closes
    into a loop. Crossing points are computed once per undirected edge so
    consecutive segments chain exactly.
    """
    if window_radius <= 0.0:
        raise InputError("window_radius must be positive")
    if start_facet is None:
        start_facet = locate_facet(mesh, frame.origin)
    P = frame.origin
    m = frame.plane_normal
    d = (mesh.vertices - P) @ m
    above = d >= 0.0  # on-plane vertices count as above (simulation of simplicity)

    crossing_cache: dict[tuple[int, int], np.ndarray] = {}

    def edge_point(f: int, k: int) -> np.ndarray:
        tri = mesh.triangles[f]
        a, b = int(tri[k]), int(tri[(k + 1) % 3])
        key = (min(a, b), max(a, b))
        pt = crossing_cache.get(key)
        if pt is None:
            da, db = d[a], d[b]
            t = da / (da - db)
            pt3 = mesh.vertices[a] + t * (mesh.vertices[b] - mesh.vertices[a])
            pt = np.array([float(np.dot(pt3 - P, frame.u_axis)),
                           float(np.dot(pt3 - P, frame.v_axis))])
            crossing_cache[key] = pt
        return pt

    start_edges = _facet_crossing_edges(mesh, start_facet, above)
    if len(start_edges) != 2:
        raise ComputationError(
            f"section plane (frame {frame.index}) does not cross the start facet {start_facet}")
    e0, e1 = start_edges
    p0, p1 = edge_point(start_facet, e0), edge_point(start_facet, e1)
    # orient the start segment toward increasing u
    if p1[0] < p0[0]:
        e0, e1 = e1, e0
        p0, p1 = p1, p0

    def walk(exit_edge_k: int, exit_point: np.ndarray):
        """Follow the section from start_facet out through exit_edge_k."""
        segs: list[tuple[int, np.ndarray]] = []  # (facet, far point) per crossed facet
        truncated = False
        closed = False
        f = start_facet
        k = exit_edge_k
        point = exit_point
        visited = {start_facet}
        while float(np.hypot(point[0], point[1])) <= window_radius:
            twin = mesh.adjacency[f, k]
            if twin < 0:
                truncated = True
                break
            nf, nk = int(twin) // 3, int(twin) % 3
            if nf == start_facet:
                closed = True
                break
            if nf in visited:
                break  # safety: should not happen on a manifold mesh
            visited.add(nf)
            edges = _facet_crossing_edges(mesh, nf, above)
            if len(edges) != 2:
                truncated = True
                break
            out_k = edges[0] if edges[1] == nk else edges[1]
            point = edge_point(nf, out_k)
            segs.append((nf, point))
            f, k = nf, out_k
        return segs, truncated, closed

    fwd, trunc_fwd, closed_fwd = walk(e1, p1)
    if closed_fwd:
        # full loop already traversed; walking backward would duplicate it
        bwd, trunc_bwd, closed_bwd = [], False, True
    else:
        bwd, trunc_bwd, closed_bwd = walk(e0, p0)
    closed = closed_fwd or closed_bwd

    pts: list[np.ndarray] = []
    facets: list[int] = []
    for f, pt in reversed(bwd):
        pts.append(pt)
        facets.append(f)
    pts.extend([p0, p1])
    facets.append(start_facet)
    for f, pt in fwd:
        pts.append(pt)
        facets.append(f)
    # drop zero-length segments (facets touching the plane in a single
    # vertex); their endpoints coincide, so the chain stays exact
    zero_tol = 1e-12 * max(mesh.bbox_diag, 1.0)
    kept_pts: list[np.ndarray] = [pts[0]]
    kept_facets: list[int] = []
    for i in range(len(facets)):
        if float(np.hypot(*(pts[i + 1] - pts[i]))) > zero_tol:
            kept_pts.append(pts[i + 1])
            kept_facets.append(facets[i])
    if not kept_facets:
        raise ComputationError(
            f"section in frame {frame.index} degenerates to a point")
    facet_arr = np.asarray(kept_facets, dtype=np.int64)
    points = np.asarray(kept_pts, dtype=float)
    normals = mesh.facet_normals[facet_arr]
    return SectionPolyline(
        points=points,
        seg_facets=facet_arr,
        seg_normals=normals,
        frame=frame,
        truncated_start=trunc_bwd,
        truncated_end=trunc_fwd,
        closed=closed,
    )


# ---------------------------------------------------------------------------
# geodesic walking and mesh projection

def _geodesic_walk_once(mesh: TriMesh, facet: int, origin: np.ndarray,
                        direction: np.ndarray, distance: float,
                        max_crossings: int) -> tuple[np.ndarray, int, str]:
    """One straight walk attempt; status is done, boundary or dead-end."""
    x = np.asarray(origin, dtype=float).copy()
    f = int(facet)
    nrm = mesh.facet_normals[f]
    dvec = np.asarray(direction, dtype=float)
    dvec = dvec - np.dot(dvec, nrm) * nrm
    dvec = unit(dvec)
    remaining = float(distance)
    entry_edge = -1
    eps = 1e-12 * max(mesh.bbox_diag, 1.0)
    for _ in range(max_crossings):
        tri = mesh.triangles[f]
        pts = mesh.vertices[tri]
        nrm_f = mesh.facet_normals[f]
        best_s = math.inf
        best_k = -1
        best_pt = None
        for k in range(3):
            if k == entry_edge:
                continue
            a, b = pts[k], pts[(k + 1) % 3]
            edge = b - a
            n_edge = np.cross(edge, nrm_f)  # in-plane edge normal
            denom = float(np.dot(dvec, n_edge))
            if abs(denom) < 1e-15:
                continue
            s = float(np.dot(a - x, n_edge)) / denom
            if s <= eps:
                continue
            hit = x + s * dvec
            ee = float(np.dot(edge, edge))
            w = float(np.dot(hit - a, edge)) / ee if ee > 0 else -1.0
            if -1e-9 <= w <= 1.0 + 1e-9 and s < best_s:
                best_s, best_k, best_pt = s, k, hit
        if best_k < 0:
            return x, f, "dead-end"  # usually an exact vertex hit
        if best_s >= remaining:
            return x + remaining * dvec, f, "done"
        remaining -= best_s
        twin = mesh.adjacency[f, best_k]
        if twin < 0:
            return best_pt, f, "boundary"
        nf, nk = int(twin) // 3, int(twin) % 3
        a = mesh.vertices[mesh.triangles[f][best_k]]
        b = mesh.vertices[mesh.triangles[f][(best_k + 1) % 3]]
        e_hat = unit(b - a)
        n0 = mesh.facet_normals[f]
        n1 = mesh.facet_normals[nf]
        # parallel transport: keep the edge component, swing the transverse
        # component into the next facet's plane
        t0 = np.cross(e_hat, n0)
        t1 = np.cross(e_hat, n1)
        dvec = np.dot(dvec, e_hat) * e_hat + np.dot(dvec, t0) * t1
        dvec = unit(dvec - np.dot(dvec, n1) * n1)
        x = np.asarray(best_pt, dtype=float)
        f, entry_edge = nf, nk
    raise ComputationError("geodesic walk exceeded the crossing limit")


def geodesic_walk(mesh: TriMesh, facet: int, origin: np.ndarray, direction: np.ndarray,
                  distance: float, max_crossings: int = 100000) -> tuple[np.ndarray, int, bool]:
    """Walk a straight line over the mesh (exact unfolding across edges).

    Returns (end point, end facet, completed). completed is False when the
    walk leaves the mesh through an open boundary before covering distance.
    Walks that run exactly through a vertex retry with a deterministic tiny
    rotation of the start direction.
    """
    nrm = mesh.facet_normals[int(facet)]
    dvec = np.asarray(direction, dtype=float)
    dvec = unit(dvec - np.dot(dvec, nrm) * nrm)
    side = unit(np.cross(nrm, dvec))
    for nudge in (0.0, 1e-7, -1e-7, 1e-5):
        d_try = unit(dvec + nudge * side)
        end, f, status = _geodesic_walk_once(mesh, facet, origin, d_try, distance,
                                             max_crossings)
        if status == "done":
            return end, f, True
        if status == "boundary":
            return end, f, False
    return end, f, False


def facet_ring(mesh: TriMesh, facet: int, rings: int) -> list[int]:
    """Facets within `rings` adjacency steps of facet (breadth-first)."""
    seen = {int(facet)}
    frontier = [int(facet)]
    for _ in range(rings):
        nxt = []
        for f in frontier:
            for k in range(3):
                twin = mesh.adjacency[f, k]
                if twin >= 0:
                    nf = int(twin) // 3
                    if nf not in seen:
                        seen.add(nf)
                        nxt.append(nf)
        frontier = nxt
        if not frontier:
            break
    return sorted(seen)


def project_point_to_mesh(mesh: TriMesh, point: np.ndarray, hint_facet: int,
                          search_distance: float | None = None) -> tuple[np.ndarray, int]:
    """Nearest mesh point to `point`, searched around hint_facet.

    The search widens breadth-first until the best distance stops improving
    and the ring radius exceeds it, so a generous hint is enough.
    """
    from .geom import closest_point_on_triangle

    point = np.asarray(point, dtype=float)
    if search_distance is None:
        search_distance = 4.0 * mesh.avg_edge_length
    rings = max(2, int(math.ceil(search_distance / max(mesh.avg_edge_length, 1e-30))) + 2)
    candidates = facet_ring(mesh, hint_facet, rings)
    best_j, best_pt, best_d = -1, None, math.inf
    for j in candidates:
        a, b, c = mesh.facet_points(j)
        q = closest_point_on_triangle(point, a, b, c)
        dd = float(np.linalg.norm(q - point))
        if dd < best_d:
            best_j, best_pt, best_d = j, q, dd
    if best_j < 0:
        raise ComputationError("mesh projection found no candidate facet")
    return best_pt, best_j
