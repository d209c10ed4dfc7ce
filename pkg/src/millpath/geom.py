"""Small vector and 2D geometry helpers used across the package.

Everything here is pure and operates on plain numpy arrays: 3D points are
shape (3,), 2D points shape (2,), polylines (m, 2) or (m, 3).
"""

from __future__ import annotations

import math

import numpy as np


def unit(v: np.ndarray) -> np.ndarray:
    """Return v / |v|; raises on zero vectors."""
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return np.asarray(v, dtype=float) / n


def unit_or_none(v: np.ndarray, tol: float = 1e-14) -> np.ndarray | None:
    n = float(np.linalg.norm(v))
    if n <= tol:
        return None
    return np.asarray(v, dtype=float) / n


def clamped_arccos(x: float) -> float:
    """arccos of a dot product clamped into [-1, 1]."""
    return math.acos(min(1.0, max(-1.0, float(x))))


def wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def wrap_angle_positive(a: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    a = math.fmod(a, 2.0 * math.pi)
    if a < 0.0:
        a += 2.0 * math.pi
    return a


def angular_distance(a: float, b: float) -> float:
    """Smallest absolute difference between two angles (result in [0, pi])."""
    return abs(wrap_angle(a - b))


def cross2(a: np.ndarray, b: np.ndarray) -> float:
    """z component of the 2D cross product."""
    return float(a[0] * b[1] - a[1] * b[0])


def least_aligned_axis(n: np.ndarray) -> np.ndarray:
    """World axis with the smallest |component| along n (deterministic)."""
    k = int(np.argmin(np.abs(n)))
    e = np.zeros(3)
    e[k] = 1.0
    return e


def perpendicular_in_plane(n: np.ndarray, seed: np.ndarray | None = None) -> np.ndarray:
    """A unit vector perpendicular to n, from seed projected into n's plane.

    Falls back to a deterministic axis when the seed is (near) parallel to n.
    """
    n = unit(n)
    if seed is None:
        seed = least_aligned_axis(n)
    s = np.asarray(seed, dtype=float)
    t = s - np.dot(s, n) * n
    u = unit_or_none(t, tol=1e-12 * max(1.0, float(np.linalg.norm(s))))
    if u is None:
        t = least_aligned_axis(n)
        t = t - np.dot(t, n) * n
        u = unit(t)
    return u


def line_line_intersection_2d(
    p0: np.ndarray, d0: np.ndarray, p1: np.ndarray, d1: np.ndarray,
    parallel_tol: float = 1e-12,
) -> tuple[float, float] | None:
    """Parameters (t, s) with p0 + t*d0 == p1 + s*d1, or None if parallel.

    The parallel test compares the normalized cross product against
    parallel_tol, so the tolerance is scale free.
    """
    denom = cross2(d0, d1)
    scale = float(np.linalg.norm(d0) * np.linalg.norm(d1))
    if scale == 0.0 or abs(denom) <= parallel_tol * scale:
        return None
    r = np.asarray(p1, dtype=float) - np.asarray(p0, dtype=float)
    t = cross2(r, d1) / denom
    s = cross2(r, d0) / denom
    return t, s


def segments_intersect_2d(
    a0: np.ndarray, a1: np.ndarray, b0: np.ndarray, b1: np.ndarray,
    endpoint_tol: float = 1e-9,
) -> np.ndarray | None:
    """Intersection point of two proper 2D segments, or None.

    Contacts within endpoint_tol (relative to segment length) of a shared
    endpoint do not count; chained polyline links always touch there.
    """
    d0 = a1 - a0
    d1 = b1 - b0
    ts = line_line_intersection_2d(a0, d0, b0, d1)
    if ts is None:
        return None
    t, s = ts
    if -endpoint_tol < t < 1.0 + endpoint_tol and -endpoint_tol < s < 1.0 + endpoint_tol:
        if (endpoint_tol < t < 1.0 - endpoint_tol) or (endpoint_tol < s < 1.0 - endpoint_tol):
            return a0 + t * d0
    return None


def point_segment_distance_2d(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """(distance, parameter t in [0, 1]) from p to segment ab."""
    d = b - a
    len2 = float(np.dot(d, d))
    if len2 == 0.0:
        return float(np.linalg.norm(p - a)), 0.0
    t = float(np.dot(p - a, d) / len2)
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(p - (a + t * d))), t


def polyline_lengths(points: np.ndarray) -> np.ndarray:
    """Cumulative arc length per vertex of an (m, k) polyline; shape (m,)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return np.zeros(0)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def polyline_point_at(points: np.ndarray, lengths: np.ndarray, s: float) -> np.ndarray:
    """Point at arc length s along the polyline (clamped to the ends)."""
    if s <= lengths[0]:
        return points[0].copy()
    if s >= lengths[-1]:
        return points[-1].copy()
    i = int(np.searchsorted(lengths, s, side="right")) - 1
    seg = lengths[i + 1] - lengths[i]
    t = 0.0 if seg == 0.0 else (s - lengths[i]) / seg
    return points[i] + t * (points[i + 1] - points[i])


def polyline_nearest(points: np.ndarray, p: np.ndarray) -> tuple[int, float, float]:
    """Nearest location on a polyline to p.

    Returns (segment index, parameter in [0, 1], distance). Vectorized over
    all segments; ties resolve to the lowest segment index.
    """
    pts = np.asarray(points, dtype=float)
    a = pts[:-1]
    d = pts[1:] - a
    len2 = np.einsum("ij,ij->i", d, d)
    len2 = np.where(len2 == 0.0, 1.0, len2)
    t = np.einsum("ij,ij->i", p - a, d) / len2
    t = np.clip(t, 0.0, 1.0)
    foot = a + t[:, None] * d
    dist = np.linalg.norm(foot - p, axis=1)
    i = int(np.argmin(dist))
    return i, float(t[i]), float(dist[i])


def densify_polyline(points: np.ndarray, max_spacing: float) -> np.ndarray:
    """Resample so no link is longer than max_spacing (original vertices kept)."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return pts.copy()
    out = [pts[0]]
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        n = max(1, int(math.ceil(float(np.linalg.norm(b - a)) / max_spacing)))
        for k in range(1, n + 1):
            out.append(a + (k / n) * (b - a))
    return np.asarray(out)


def circle_segment_intersections(
    center: np.ndarray, radius: float, a: np.ndarray, b: np.ndarray
) -> list[float]:
    """Parameters t in [0, 1] where segment ab crosses the circle boundary."""
    d = b - a
    f = a - center
    A = float(np.dot(d, d))
    if A == 0.0:
        return []
    B = 2.0 * float(np.dot(f, d))
    C = float(np.dot(f, f)) - radius * radius
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    out = []
    for t in ((-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)):
        if 0.0 <= t <= 1.0:
            out.append(t)
    return sorted(set(out))


def closest_point_on_triangle(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Closest point to p on triangle abc (Ericson's region method)."""
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = float(np.dot(ab, ap))
    d2 = float(np.dot(ac, ap))
    if d1 <= 0.0 and d2 <= 0.0:
        return a.copy()
    bp = p - b
    d3 = float(np.dot(ab, bp))
    d4 = float(np.dot(ac, bp))
    if d3 >= 0.0 and d4 <= d3:
        return b.copy()
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return a + v * ab
    cp = p - c
    d5 = float(np.dot(ab, cp))
    d6 = float(np.dot(ac, cp))
    if d6 >= 0.0 and d5 <= d6:
        return c.copy()
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return a + w * ac
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return b + w * (c - b)
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return a + ab * v + ac * w
