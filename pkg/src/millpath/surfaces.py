"""Analytic surface backend: catalog, isophotes, projections, curvature.

Surfaces come in two kinds. Graph surfaces z = f(x, y) are wrapped as the
parameterization (u, v, f(u, v)); parametric ones supply r(u, v) directly.
All evaluators are vectorized numpy callables and every builder checks its
analytic partials against central finite differences before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .contact import ContactPoint, PatchBoundary, ToolSpec
from .errors import ComputationError, InputError
from .mesh import make_section_frames

FD_STEP_FRACTION = 1e-5
FD_REL_TOL = 1e-5


@dataclass(frozen=True)
class AnalyticSurface:
    """Twice differentiable surface over a parameter rectangle."""

    name: str
    kind: str                                  # "graph" | "parametric"
    domain: tuple[float, float, float, float]  # (u1, u2, v1, v2)
    feature_size: float
    point_fn: callable = field(repr=False)
    du_fn: callable = field(repr=False)
    dv_fn: callable = field(repr=False)
    duu_fn: callable = field(repr=False)
    duv_fn: callable = field(repr=False)
    dvv_fn: callable = field(repr=False)
    f_partials: tuple | None = field(default=None, repr=False)  # (fx, fy) graph only
    params_used: dict = field(default_factory=dict)

    # -- evaluation ----------------------------------------------------------

    def point(self, u, v) -> np.ndarray:
        return self.point_fn(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def du(self, u, v) -> np.ndarray:
        return self.du_fn(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def dv(self, u, v) -> np.ndarray:
        return self.dv_fn(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    def normal(self, u, v) -> np.ndarray:
        n = np.cross(self.du(u, v), self.dv(u, v))
        norm = np.linalg.norm(n, axis=-1, keepdims=True)
        if np.any(norm == 0.0):
            raise ComputationError(f"{self.name}: irregular parameterization point")
        return n / norm

    def domain_size(self) -> float:
        u1, u2, v1, v2 = self.domain
        return math.hypot(u2 - u1, v2 - v1)

    def contains(self, u: float, v: float, slack: float = 0.0) -> bool:
        u1, u2, v1, v2 = self.domain
        return (u1 - slack) <= u <= (u2 + slack) and (v1 - slack) <= v <= (v2 + slack)

    def clamp(self, u: float, v: float) -> tuple[float, float]:
        u1, u2, v1, v2 = self.domain
        return min(max(u, u1), u2), min(max(v, v1), v2)


def validate_partials(surface: AnalyticSurface, samples: int = 8, seed: int = 0) -> None:
    """Check first/second partials against central differences at random points."""
    rng = np.random.default_rng(seed)
    u1, u2, v1, v2 = surface.domain
    h = FD_STEP_FRACTION * surface.domain_size()
    us = rng.uniform(u1 + 2 * h, u2 - 2 * h, samples)
    vs = rng.uniform(v1 + 2 * h, v2 - 2 * h, samples)
    scale = max(1.0, surface.feature_size)

    def check(label, analytic, plus, minus):
        fd = (plus - minus) / (2.0 * h)
        err = np.max(np.abs(analytic - fd)) / scale
        if err > FD_REL_TOL:
            raise InputError(
                f"{surface.name}: {label} disagrees with finite differences (err {err:.2e})")

    check("du", surface.du(us, vs), surface.point(us + h, vs), surface.point(us - h, vs))
    check("dv", surface.dv(us, vs), surface.point(us, vs + h), surface.point(us, vs - h))
    check("duu", surface.duu_fn(us, vs), surface.du(us + h, vs), surface.du(us - h, vs))
    check("duv", surface.duv_fn(us, vs), surface.du(us, vs + h), surface.du(us, vs - h))
    check("dvv", surface.dvv_fn(us, vs), surface.dv(us, vs + h), surface.dv(us, vs - h))


def _graph_surface(name: str, domain, feature_size, f, fx, fy, fxx, fxy, fyy,
                   params: dict) -> AnalyticSurface:
    def stack(u, v, z):
        return np.stack([np.broadcast_to(u, np.shape(z)), np.broadcast_to(v, np.shape(z)), z],
                        axis=-1)

    zero = lambda u, v: np.zeros_like(np.asarray(u, dtype=float))
    one = lambda u, v: np.ones_like(np.asarray(u, dtype=float))
    surface = AnalyticSurface(
        name=name, kind="graph", domain=domain, feature_size=feature_size,
        point_fn=lambda u, v: stack(u, v, f(u, v)),
        du_fn=lambda u, v: stack(one(u, v), zero(u, v), fx(u, v)),
        dv_fn=lambda u, v: stack(zero(u, v), one(u, v), fy(u, v)),
        duu_fn=lambda u, v: stack(zero(u, v), zero(u, v), fxx(u, v)),
        duv_fn=lambda u, v: stack(zero(u, v), zero(u, v), fxy(u, v)),
        dvv_fn=lambda u, v: stack(zero(u, v), zero(u, v), fyy(u, v)),
        f_partials=(fx, fy),
        params_used=params,
    )
    validate_partials(surface)
    return surface


# ---------------------------------------------------------------------------
# built-in catalog

def make_plane(half_extent: float = 10.0) -> AnalyticSurface:
    d = (-half_extent, half_extent, -half_extent, half_extent)
    z = lambda u, v: np.zeros_like(np.asarray(u, dtype=float))
    return _graph_surface("plane", d, 2.0 * half_extent * math.sqrt(2.0),
                          z, z, z, z, z, z, {"half_extent": half_extent})


def make_paraboloid(curvature: float = 0.05, half_extent: float = 10.0) -> AnalyticSurface:
    c = curvature
    d = (-half_extent, half_extent, -half_extent, half_extent)
    return _graph_surface(
        "paraboloid", d, 1.0 / (2.0 * c),
        f=lambda u, v: c * (u * u + v * v),
        fx=lambda u, v: 2.0 * c * u + 0.0 * v,
        fy=lambda u, v: 2.0 * c * v + 0.0 * u,
        fxx=lambda u, v: np.full_like(np.asarray(u, dtype=float), 2.0 * c),
        fxy=lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
        fyy=lambda u, v: np.full_like(np.asarray(u, dtype=float), 2.0 * c),
        params={"curvature": c, "half_extent": half_extent},
    )


def make_sphere_graph(radius: float = 20.0, cap_fraction: float = 0.55) -> AnalyticSurface:
    R = radius
    h = cap_fraction * R
    d = (-h, h, -h, h)

    def f(u, v):
        return np.sqrt(R * R - u * u - v * v)

    fx = lambda u, v: -u / f(u, v)
    fy = lambda u, v: -v / f(u, v)
    fxx = lambda u, v: -(R * R - v * v) / f(u, v) ** 3
    fyy = lambda u, v: -(R * R - u * u) / f(u, v) ** 3
    fxy = lambda u, v: -u * v / f(u, v) ** 3
    return _graph_surface("sphere", d, R, f, fx, fy, fxx, fxy, fyy,
                          {"radius": R, "cap_fraction": cap_fraction})


def make_trig_bump(amplitude: float = 5.0, omega: float = 0.07,
                   half_extent: float = 45.0) -> AnalyticSurface:
    A, w = amplitude, omega
    d = (-half_extent, half_extent, -half_extent, half_extent)
    return _graph_surface(
        "trig_bump", d, 1.0 / (A * w * w),
        f=lambda u, v: A * np.sin(w * u) * np.cos(w * v),
        fx=lambda u, v: A * w * np.cos(w * u) * np.cos(w * v),
        fy=lambda u, v: -A * w * np.sin(w * u) * np.sin(w * v),
        fxx=lambda u, v: -A * w * w * np.sin(w * u) * np.cos(w * v),
        fxy=lambda u, v: -A * w * w * np.cos(w * u) * np.sin(w * v),
        fyy=lambda u, v: -A * w * w * np.sin(w * u) * np.cos(w * v),
        params={"amplitude": A, "omega": w, "half_extent": half_extent},
    )


def make_cylinder(radius: float = 10.0, length: float = 40.0,
                  arc: float = 1.2) -> AnalyticSurface:
    """Cylinder with axis along +y; u is the angle from the top, v the axial
    coordinate. Outward normals."""
    R = radius
    d = (-arc, arc, -length / 2.0, length / 2.0)
    zero = lambda u, v: np.zeros_like(np.asarray(u, dtype=float))

    def stack(a, b, c):
        return np.stack(np.broadcast_arrays(a, b, c), axis=-1)

    surface = AnalyticSurface(
        name="cylinder", kind="parametric", domain=d, feature_size=R,
        point_fn=lambda u, v: stack(R * np.sin(u), np.asarray(v, dtype=float), R * np.cos(u)),
        du_fn=lambda u, v: stack(R * np.cos(u), zero(u, v), -R * np.sin(u)),
        dv_fn=lambda u, v: stack(zero(u, v), np.ones_like(np.asarray(v, dtype=float)), zero(u, v)),
        duu_fn=lambda u, v: stack(-R * np.sin(u), zero(u, v), -R * np.cos(u)),
        duv_fn=lambda u, v: stack(zero(u, v), zero(u, v), zero(u, v)),
        dvv_fn=lambda u, v: stack(zero(u, v), zero(u, v), zero(u, v)),
        params_used={"radius": R, "length": length, "arc": arc},
    )
    validate_partials(surface)
    return surface


def make_torus(major_radius: float = 5.0, minor_radius: float = 2.5,
               v_max: float = 1.824) -> AnalyticSurface:
    """Torus with outward normals; u runs around the axis, v around the tube.

    The default tube domain stops short of the inner equator so the Gaussian
    curvature spans roughly [-0.023, +0.053] for the default radii.
    """
    R0, r0 = major_radius, minor_radius
    d = (-math.pi, math.pi, -v_max, v_max)

    def stack(a, b, c):
        return np.stack(np.broadcast_arrays(a, b, c), axis=-1)

    ring = lambda v: R0 + r0 * np.cos(v)
    surface = AnalyticSurface(
        name="torus", kind="parametric", domain=d, feature_size=r0,
        point_fn=lambda u, v: stack(ring(v) * np.cos(u), ring(v) * np.sin(u), r0 * np.sin(v)),
        du_fn=lambda u, v: stack(-ring(v) * np.sin(u), ring(v) * np.cos(u),
                                 np.zeros_like(np.asarray(u, dtype=float))),
        dv_fn=lambda u, v: stack(-r0 * np.sin(v) * np.cos(u), -r0 * np.sin(v) * np.sin(u),
                                 r0 * np.cos(v)),
        duu_fn=lambda u, v: stack(-ring(v) * np.cos(u), -ring(v) * np.sin(u),
                                  np.zeros_like(np.asarray(u, dtype=float))),
        duv_fn=lambda u, v: stack(r0 * np.sin(v) * np.sin(u), -r0 * np.sin(v) * np.cos(u),
                                  np.zeros_like(np.asarray(u, dtype=float))),
        dvv_fn=lambda u, v: stack(-r0 * np.cos(v) * np.cos(u), -r0 * np.cos(v) * np.sin(u),
                                  -r0 * np.sin(v)),
        params_used={"major_radius": R0, "minor_radius": r0, "v_max": v_max},
    )
    validate_partials(surface)
    return surface


SURFACE_CATALOG = {
    "plane": make_plane,
    "paraboloid": make_paraboloid,
    "sphere": make_sphere_graph,
    "cylinder": make_cylinder,
    "torus": make_torus,
    "trig_bump": make_trig_bump,
}


def make_surface(name: str, **params) -> AnalyticSurface:
    if name not in SURFACE_CATALOG:
        raise InputError(
            f"unknown surface {name!r}; available: {', '.join(sorted(SURFACE_CATALOG))}")
    try:
        return SURFACE_CATALOG[name](**params)
    except TypeError as exc:
        raise InputError(f"bad parameters for surface {name!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# graph-surface isophotes

def graph_normal(surface: AnalyticSurface, x: float, y: float) -> np.ndarray:
    """Upward unit normal (-fx, -fy, 1)/sqrt(fx^2 + fy^2 + 1) of a graph."""
    if surface.kind != "graph":
        raise InputError("graph_normal needs a graph surface")
    fx, fy = surface.f_partials
    gx = float(fx(x, y))
    gy = float(fy(x, y))
    n = np.array([-gx, -gy, 1.0])
    return n / math.sqrt(gx * gx + gy * gy + 1.0)


def _slope_square(surface: AnalyticSurface, x, y):
    fx, fy = surface.f_partials
    return fx(x, y) ** 2 + fy(x, y) ** 2


def isophote_residual(surface: AnalyticSurface, x: float, y: float,
                      xP: float, yP: float) -> float:
    """Signed slope-square mismatch; zero exactly on the isophote through P
    for a vertical tool axis."""
    if surface.kind != "graph":
        raise InputError("isophote_residual needs a graph surface")
    return float(_slope_square(surface, x, y) - _slope_square(surface, xP, yP))


def _slope_gradient(surface: AnalyticSurface, x: float, y: float) -> np.ndarray:
    # gradient of fx^2 + fy^2 via the second partials of the stacked chart
    fxx = float(surface.duu_fn(x, y)[..., 2])
    fxy = float(surface.duv_fn(x, y)[..., 2])
    fyy = float(surface.dvv_fn(x, y)[..., 2])
    fx, fy = surface.f_partials
    gx = float(fx(x, y))
    gy = float(fy(x, y))
    return np.array([2.0 * gx * fxx + 2.0 * gy * fxy, 2.0 * gx * fxy + 2.0 * gy * fyy])


def trace_isophote(surface: AnalyticSurface, start: tuple[float, float],
                   step: float, count: int) -> np.ndarray:
    """March along the isophote through start; returns (m, 2) parameter points.

    Midpoint predictor plus Newton corrector onto the slope-square level set;
    every returned point satisfies the isophote equation to 1e-10 relative.
    Stops at the domain boundary or after closing the loop.
    """
    if surface.kind != "graph":
        raise InputError("trace_isophote needs a graph surface")
    if step <= 0.0 or count < 1:
        raise InputError("step must be positive and count at least 1")
    x0, y0 = float(start[0]), float(start[1])
    level = float(_slope_square(surface, x0, y0))
    tol = 1e-10 * (1.0 + abs(level))

    def g(p):
        return float(_slope_square(surface, p[0], p[1])) - level

    def tangent(p):
        grad = _slope_gradient(surface, p[0], p[1])
        nrm = float(np.linalg.norm(grad))
        if nrm < 1e-14:
            raise ComputationError("isophote undefined (umbilic or flat point)")
        return np.array([-grad[1], grad[0]]) / nrm, grad, nrm

    def correct(p):
        for _ in range(25):
            val = g(p)
            if abs(val) <= tol:
                return p
            grad = _slope_gradient(surface, p[0], p[1])
            nrm2 = float(np.dot(grad, grad))
            if nrm2 < 1e-28:
                raise ComputationError("isophote undefined (umbilic or flat point)")
            p = p - val * grad / nrm2
        raise ComputationError("isophote corrector failed to converge")

    p = np.array([x0, y0])
    tangent(p)  # verify the start is non-degenerate
    points = [p.copy()]
    for k in range(count):
        t1, _, _ = tangent(p)
        mid = p + 0.5 * step * t1
        if not surface.contains(mid[0], mid[1]):
            break
        t2, _, _ = tangent(mid)
        q = p + step * t2
        if not surface.contains(q[0], q[1]):
            break
        q = correct(q)
        if not surface.contains(q[0], q[1]):
            break
        points.append(q.copy())
        p = q
        if k > 2 and float(np.linalg.norm(p - points[0])) < 0.5 * step:
            break  # closed loop
    return np.asarray(points)


# ---------------------------------------------------------------------------
# tangent decomposition and projections

@dataclass(frozen=True)
class TangentCoefficients:
    """Tangent direction expressed in the chart basis, plus march controls."""

    a: float
    b: float
    dt: float
    steps: int
    residual: float = 0.0

    def unit_param_direction(self) -> np.ndarray:
        h = math.hypot(self.a, self.b)
        if h == 0.0:
            raise ComputationError("tangent decomposes to the zero parameter direction")
        return np.array([self.a / h, self.b / h])


def tangent_decomposition(surface: AnalyticSurface, P_params: tuple[float, float],
                          s: np.ndarray, dt: float | None = None,
                          steps: int = 2000) -> TangentCoefficients:
    """Coefficients (a, b) with s = a*du + b*dv at P (least squares when s is
    not exactly tangent; the out-of-plane residual is reported)."""
    u, v = P_params
    ru = surface.du(u, v)
    rv = surface.dv(u, v)
    E = float(np.dot(ru, ru))
    F = float(np.dot(ru, rv))
    G = float(np.dot(rv, rv))
    det = E * G - F * F
    if det <= 1e-14 * max(E * G, 1e-300):
        raise ComputationError(f"{surface.name}: irregular parameterization point {P_params}")
    M = np.stack([ru, rv], axis=1)
    sol, _, _, _ = np.linalg.lstsq(M, np.asarray(s, dtype=float), rcond=None)
    a, b = float(sol[0]), float(sol[1])
    residual = float(np.linalg.norm(M @ sol - s))
    if dt is None:
        dt = surface.domain_size() / 1000.0
    return TangentCoefficients(a=a, b=b, dt=dt, steps=steps, residual=residual)


@dataclass(frozen=True)
class SurfacePoint:
    params: tuple[float, float]
    position: np.ndarray
    distance: float


def _ray_domain_limit(surface: AnalyticSurface, origin: np.ndarray, direction: np.ndarray) -> float:
    """Largest t with origin + t*direction inside the parameter rectangle."""
    u1, u2, v1, v2 = surface.domain
    t_max = math.inf
    for x, d, lo, hi in ((origin[0], direction[0], u1, u2), (origin[1], direction[1], v1, v2)):
        if d > 0:
            t_max = min(t_max, (hi - x) / d)
        elif d < 0:
            t_max = min(t_max, (lo - x) / d)
    return max(t_max, 0.0)


def march_project(surface: AnalyticSurface, P_params: tuple[float, float],
                  coeffs: TangentCoefficients, B: np.ndarray) -> SurfacePoint:
    """Project B onto the surface by marching the parameter ray through P.

    Samples r(P + k*dt*(a, b)/|(a, b)|) for k = 0..K, takes the distance
    minimum and refines it with a golden-section pass over the bracketing
    interval. A minimum at the far end means the ray was too short.
    """
    B = np.asarray(B, dtype=float)
    origin = np.array([float(P_params[0]), float(P_params[1])])
    direction = coeffs.unit_param_direction()
    t_exit = _ray_domain_limit(surface, origin, direction)
    k_max = min(coeffs.steps, int(math.floor(t_exit / coeffs.dt)))
    ts = coeffs.dt * np.arange(0, k_max + 1)
    pts = surface.point(origin[0] + ts * direction[0], origin[1] + ts * direction[1])
    dist = np.linalg.norm(pts - B, axis=-1)
    k_star = int(np.argmin(dist))
    if k_star == 0:
        return SurfacePoint(params=(origin[0], origin[1]), position=pts[0],
                            distance=float(dist[0]))
    if k_star >= k_max:
        raise ComputationError(
            "projection ray too short (minimum at the last sample); increase the "
            "step count or step size")

    def fn(t):
        p = surface.point(origin[0] + t * direction[0], origin[1] + t * direction[1])
        return float(np.linalg.norm(p - B))

    res = minimize_scalar(fn, bracket=(float(ts[k_star - 1]), float(ts[k_star]),
                                       float(ts[k_star + 1])),
                          method="golden", options={"xtol": 1e-10})
    t_best = float(res.x)
    uv = (float(origin[0] + t_best * direction[0]), float(origin[1] + t_best * direction[1]))
    return SurfacePoint(params=uv, position=surface.point(*uv), distance=float(res.fun))


def refine_projection(surface: AnalyticSurface, X: np.ndarray,
                      params0: tuple[float, float], iterations: int = 30) -> SurfacePoint:
    """Damped Newton refinement of the squared distance from params0."""
    X = np.asarray(X, dtype=float)
    u, v = surface.clamp(float(params0[0]), float(params0[1]))

    def value(u, v):
        return float(np.dot(surface.point(u, v) - X, surface.point(u, v) - X))

    best = value(u, v)
    for _ in range(iterations):
        p = surface.point(u, v)
        ru, rv = surface.du(u, v), surface.dv(u, v)
        diff = p - X
        grad = 2.0 * np.array([float(np.dot(diff, ru)), float(np.dot(diff, rv))])
        h11 = 2.0 * (float(np.dot(ru, ru)) + float(np.dot(diff, surface.duu_fn(u, v))))
        h12 = 2.0 * (float(np.dot(ru, rv)) + float(np.dot(diff, surface.duv_fn(u, v))))
        h22 = 2.0 * (float(np.dot(rv, rv)) + float(np.dot(diff, surface.dvv_fn(u, v))))
        H = np.array([[h11, h12], [h12, h22]])
        try:
            step = np.linalg.solve(H, grad)
        except np.linalg.LinAlgError:
            step = grad
        scale = 1.0
        for _ in range(12):
            nu, nv = surface.clamp(u - scale * step[0], v - scale * step[1])
            cand = value(nu, nv)
            if cand <= best:
                u, v, best = nu, nv, cand
                break
            scale *= 0.5
        else:
            break
        if float(np.hypot(*step)) * scale < 1e-13 * (1.0 + surface.domain_size()):
            break
    pos = surface.point(u, v)
    return SurfacePoint(params=(u, v), position=pos, distance=float(np.linalg.norm(pos - X)))


def nearest_point_oracle(surface: AnalyticSurface, X: np.ndarray,
                         grid: int = 64) -> SurfacePoint:
    """Brute-force nearest surface point: dense grid scan plus refinement.

    Serves as the validation oracle for march_project; with grid >= 64 the
    scan cannot miss the global basin on the catalog surfaces.
    """
    if grid < 64:
        raise InputError("oracle grid must be at least 64")
    X = np.asarray(X, dtype=float)
    u1, u2, v1, v2 = surface.domain
    us = np.linspace(u1, u2, grid + 1)
    vs = np.linspace(v1, v2, grid + 1)
    U, V = np.meshgrid(us, vs, indexing="ij")
    pts = surface.point(U, V)
    dist = np.linalg.norm(pts - X, axis=-1)
    i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
    return refine_projection(surface, X, (float(us[i]), float(vs[j])))


def gaussian_curvature(surface: AnalyticSurface, params: tuple[float, float]) -> float:
    """K = (LN - M^2) / (EG - F^2) from the fundamental forms."""
    u, v = float(params[0]), float(params[1])
    ru, rv = surface.du(u, v), surface.dv(u, v)
    E = float(np.dot(ru, ru))
    F = float(np.dot(ru, rv))
    G = float(np.dot(rv, rv))
    det = E * G - F * F
    if det <= 1e-14 * max(E * G, 1e-300):
        raise ComputationError(f"{surface.name}: irregular point {params}")
    n = surface.normal(u, v)
    L = float(np.dot(surface.duu_fn(u, v), n))
    M = float(np.dot(surface.duv_fn(u, v), n))
    N = float(np.dot(surface.dvv_fn(u, v), n))
    return (L * N - M * M) / det


# ---------------------------------------------------------------------------
# analytic processed patch

def contact_on_surface(surface: AnalyticSurface, params: tuple[float, float],
                       tool: ToolSpec) -> ContactPoint:
    u, v = float(params[0]), float(params[1])
    if not surface.contains(u, v):
        raise InputError(f"contact parameters {params} outside the domain {surface.domain}")
    P = surface.point(u, v)
    N = surface.normal(u, v)
    return ContactPoint(position=P, normal=N, ball_center=P + tool.radius * N,
                        params=(u, v))


def contact_boundary_analytic(surface: AnalyticSurface, contact: ContactPoint,
                              tool: ToolSpec, n: int = 12,
                              seed: np.ndarray | None = None,
                              bracket_samples: int = 64) -> PatchBoundary:
    """Patch boundary on an analytic surface from the contact equation.

    In each normal plane the surface curve is approximated by the parameter
    ray of the plane's tangent direction; the boundary point B solves
    distance(C, B + eps*N(B)) = r along it (bracketed sampling, then a
    bisection/secant hybrid to 1e-10 in the parameter).
    """
    if n < 4:
        raise InputError(f"need at least 4 section planes, got {n}")
    if contact.params is None:
        raise InputError("analytic patch computation needs a contact with parameters")
    P_params = contact.params
    C = contact.ball_center
    eps = tool.tolerance
    r = tool.radius
    frames = make_section_frames(contact.position, contact.normal, seed, n)
    two_n = 2 * n
    points = np.full((two_n, 3), np.nan)
    normals = np.full((two_n, 3), np.nan)
    params_arr = np.full((two_n, 2), np.nan)
    thetas = np.array([math.pi * k / n for k in range(two_n)])
    valid = np.zeros(two_n, dtype=bool)
    point_flags: list[list[str]] = [[] for _ in range(two_n)]
    frame_flags: list[list[str]] = [[] for _ in range(n)]
    origin = np.array([float(P_params[0]), float(P_params[1])])

    def g_of(direction):
        def g(t):
            uu = origin[0] + t * direction[0]
            vv = origin[1] + t * direction[1]
            p = surface.point(uu, vv)
            nn = surface.normal(uu, vv)
            return float(np.linalg.norm(C - (p + eps * nn))) - r
        return g

    for i, frame in enumerate(frames):
        for sign, slot in ((1.0, i), (-1.0, i + n)):
            try:
                coeffs = tangent_decomposition(surface, P_params, sign * frame.u_axis)
                direction = coeffs.unit_param_direction()
                speed = float(np.linalg.norm(coeffs.a * surface.du(*P_params)
                                             + coeffs.b * surface.dv(*P_params))
                              / math.hypot(coeffs.a, coeffs.b))
                t_hi = 1.6 * r / speed
                t_hi = min(t_hi, _ray_domain_limit(surface, origin, direction))
                if t_hi <= 0.0:
                    raise ComputationError("contact sits on the domain boundary")
                g = g_of(direction)
                ts = np.linspace(0.0, t_hi, bracket_samples + 1)
                root = None
                prev_t, prev_g = 0.0, -eps
                for t in ts[1:]:
                    val = g(float(t))
                    if val >= 0.0:
                        root = brentq(g, prev_t, float(t), xtol=1e-10, maxiter=100)
                        break
                    prev_t, prev_g = float(t), val
                if root is None:
                    raise ComputationError("no boundary crossing within the search interval "
                                           "(tool larger than the local feature)")
                uu = float(origin[0] + root * direction[0])
                vv = float(origin[1] + root * direction[1])
                points[slot] = surface.point(uu, vv)
                normals[slot] = surface.normal(uu, vv)
                params_arr[slot] = (uu, vv)
                valid[slot] = True
            except ComputationError as exc:
                frame_flags[i].append("frame-failed")
                point_flags[slot].append(f"no-root:{exc}")
    if int(valid.sum()) < math.ceil(0.75 * two_n):
        raise ComputationError(
            f"only {int(valid.sum())} of {two_n} analytic boundary points found")
    u0 = frames[0].u_axis
    return PatchBoundary(
        contact=contact, n_planes=n, points=points, normals=normals, thetas=thetas,
        valid=valid, point_flags=point_flags, frame_flags=frame_flags,
        frame_reports=[None] * n, u0=u0, w0=np.cross(contact.normal, u0),
        params=params_arr,
    )
