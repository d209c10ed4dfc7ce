"""Tool-circle intersections, boundary projection and processed patches."""

import math

import numpy as np
import pytest

from millpath.contact import (
    ContactPoint,
    ToolSpec,
    contact_boundary_points,
    contact_on_mesh,
    processed_patch,
    project_boundary_point,
    tool_section_circle,
)
from millpath.errors import ComputationError, InputError
from millpath.mesh import locate_facet, make_section_frames, plane_section
from millpath.offsetting import OffsetPolyline, offset_segments, repair_offset
from millpath.synthetic import cylinder_mesh, sphere_sagitta


def flat_case_u(r, eps):
    """Half-diameter of the flat-surface contact: circle-line intersection."""
    return math.sqrt(2.0 * r * eps - eps * eps)


def offset_line(v, u_range=(-4.0, 4.0), n=33):
    us = np.linspace(u_range[0], u_range[1], n)
    pts = np.stack([us, np.full(n, v)], axis=1)
    return OffsetPolyline(points=pts, provenance=[("seg", i) for i in range(n)],
                          repair_log=[], interference_flags=[], epsilon=v)


# ---------------------------------------------------------------------------
# tool spec and circle

def test_tool_spec_validation():
    with pytest.raises(InputError):
        ToolSpec(radius=-1.0, tolerance=0.1)
    with pytest.raises(InputError):
        ToolSpec(radius=5.0, tolerance=5.0)
    with pytest.raises(InputError):
        ToolSpec(radius=5.0, tolerance=0.5, axis=np.array([0.0, 0, 2]))
    tool = ToolSpec(radius=8.0, tolerance=8.0 / 3.0)  # one third of the radius
    assert 0 < tool.tolerance < tool.radius


def test_tool_section_circle_center_height(tool):
    P = np.zeros(3)
    N = np.array([0.0, 0, 1])
    contact = ContactPoint(position=P, normal=N, ball_center=P + 5.0 * N)
    for frame in make_section_frames(P, N, np.array([1.0, 0, 0]), 5):
        center, radius = tool_section_circle(tool, contact, frame)
        np.testing.assert_allclose(center, [0.0, 5.0], atol=1e-12)
        assert radius == 5.0


def test_tool_section_circle_rejects_off_plane(tool):
    P = np.zeros(3)
    N = np.array([0.0, 0, 1])
    contact = ContactPoint(position=P, normal=N, ball_center=np.array([1.0, 2.0, 3.0]))
    frame = make_section_frames(P, N, np.array([1.0, 0, 0]), 2)[0]
    with pytest.raises(ComputationError):
        tool_section_circle(tool, contact, frame)


# ---------------------------------------------------------------------------
# circle / offset intersections

def test_flat_intersection_closed_form():
    r, eps = 5.0, 0.5
    off = offset_line(eps)
    b_lo, b_hi, flags = contact_boundary_points(off, (np.array([0.0, r]), r))
    u = flat_case_u(r, eps)
    np.testing.assert_allclose(b_lo, [-u, eps], atol=1e-9)
    np.testing.assert_allclose(b_hi, [u, eps], atol=1e-9)
    assert flags == []
    assert abs(u - 2.179449) < 1e-6


def test_equator_limit():
    # offset at the ball equator height crosses at u = +-r
    r = 5.0
    off = offset_line(r, u_range=(-7, 7))
    b_lo, b_hi, _ = contact_boundary_points(off, (np.array([0.0, r]), r))
    np.testing.assert_allclose([b_lo[0], b_hi[0]], [-r, r], atol=1e-9)


def test_concave_section_widens_contact():
    # concave circular section of radius 10: offset is a circle of radius
    # 9.5 centered at (0, 10); crossings sit wider than the flat case
    r, eps, R = 5.0, 0.5, 10.0
    th = np.linspace(-1.0, 1.0, 4001)
    pts = np.stack([(R - eps) * np.sin(th), R - (R - eps) * np.cos(th)], axis=1)
    off = OffsetPolyline(points=pts, provenance=[("seg", i) for i in range(len(pts))],
                         repair_log=[], interference_flags=[], epsilon=eps)
    b_lo, b_hi, _ = contact_boundary_points(off, (np.array([0.0, r]), r))
    u_flat = flat_case_u(r, eps)
    assert abs(b_hi[0]) > u_flat and abs(b_lo[0]) > u_flat
    # circle-circle oracle: |x - (0, R)| = R - eps and |x - (0, r)| = r
    v = (2.0 * R * eps - eps * eps) / (2.0 * (R - r))
    u_expected = math.sqrt(r * r - (v - r) ** 2)
    np.testing.assert_allclose(abs(b_hi[0]), u_expected, atol=1e-5)


def test_multi_intersection_flagged():
    # zigzag offset crossing the tool circle three times per side
    r = 5.0
    us = [-3.6, -3.2, -3.0, -2.8, 0.0, 2.8, 3.0, 3.2, 3.6]
    vs = [0.7, 1.3, 0.6, 0.9, 0.5, 0.9, 0.6, 1.3, 0.7]
    pts = np.stack([us, vs], axis=1).astype(float)
    off = OffsetPolyline(points=pts, provenance=[("seg", i) for i in range(len(pts))],
                         repair_log=[], interference_flags=[], epsilon=0.5)
    b_lo, b_hi, flags = contact_boundary_points(off, (np.array([0.0, r]), r))
    assert "multi-intersection" in flags
    # innermost pair kept
    assert 2.8 <= b_hi[0] <= 3.0
    assert -3.0 <= b_lo[0] <= -2.8


def test_window_too_small_errors():
    off = offset_line(0.5, u_range=(-1.0, 1.0))  # ends inside the circle
    with pytest.raises(ComputationError, match="window"):
        contact_boundary_points(off, (np.array([0.0, 5.0]), 5.0))


# ---------------------------------------------------------------------------
# projection back to the mesh

def test_project_flat_boundary_point(coarse_flat_mesh):
    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frame = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)[0]
    sec = plane_section(coarse_flat_mesh, frame, 4.0, start_facet=f)
    u = flat_case_u(5.0, 0.5)
    proj = project_boundary_point(np.array([u, 0.5]), sec)
    np.testing.assert_allclose(proj.uv, [u, 0.0], atol=1e-9)
    np.testing.assert_allclose(proj.position, P + u * frame.u_axis, atol=1e-9)
    assert np.linalg.norm(proj.position - P) == pytest.approx(u, abs=1e-9)
    assert proj.flags == []


def test_project_point_on_polyline_is_identity(coarse_flat_mesh):
    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frame = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)[0]
    sec = plane_section(coarse_flat_mesh, frame, 4.0, start_facet=f)
    B = 0.5 * (sec.points[1] + sec.points[2])
    proj = project_boundary_point(B, sec)
    np.testing.assert_allclose(proj.uv, B, atol=1e-12)


def test_project_endpoint_flagged(coarse_flat_mesh):
    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frame = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)[0]
    sec = plane_section(coarse_flat_mesh, frame, 2.0, start_facet=f)
    far = sec.points[-1] + np.array([5.0, 0.0])
    proj = project_boundary_point(far, sec)
    assert "window-clipped" in proj.flags


def test_project_sphere_boundary_on_surface(fine_sphere_mesh):
    R, r, eps = 20.0, 5.0, 0.5
    tool = ToolSpec(r, eps)
    facet = 11
    contact = contact_on_mesh(fine_sphere_mesh, facet, tool)
    frame = make_section_frames(contact.position, contact.normal, None, 2)[0]
    sec = plane_section(fine_sphere_mesh, frame, 6.0, start_facet=facet)
    repaired = repair_offset(offset_segments(sec, eps), eps)
    circle = tool_section_circle(tool, contact, frame)
    b_lo, b_hi, _ = contact_boundary_points(repaired, circle)
    sag = sphere_sagitta(fine_sphere_mesh, R)
    for B in (b_lo, b_hi):
        proj = project_boundary_point(B, sec)
        assert abs(np.linalg.norm(proj.position) - R) < sag + 1e-9


# ---------------------------------------------------------------------------
# processed patches

def test_flat_patch_regular_polygon(flat_mesh, tool):
    f = locate_facet(flat_mesh, np.array([0.1, 0.1, 0.0]))
    contact = contact_on_mesh(flat_mesh, f, tool)
    patch = processed_patch(flat_mesh, contact, tool, n=12)
    assert int(patch.valid.sum()) == 24
    d = patch.diameters()
    expected = 2.0 * flat_case_u(5.0, 0.5)
    assert np.nanmax(np.abs(d - expected)) < 0.01 * expected
    # boundary points on the mesh plane
    assert np.max(np.abs(patch.points[:, 2])) < 1e-9


def test_patch_diameter_monotone_in_eps(flat_mesh):
    f = locate_facet(flat_mesh, np.array([0.1, 0.1, 0.0]))
    prev = None
    for eps in (0.25, 0.5, 1.0, 2.0):
        tool = ToolSpec(5.0, eps)
        contact = contact_on_mesh(flat_mesh, f, tool)
        patch = processed_patch(flat_mesh, contact, tool, n=6)
        d = float(np.nanmean(patch.diameters()))
        expected = 2.0 * flat_case_u(5.0, eps)
        assert abs(d - expected) < 0.01 * expected
        if prev is not None:
            assert d > prev
        prev = d


def test_cylinder_patch_direction_ordering(tool):
    mesh = cylinder_mesh(10.0, 24.0, 64, 16)
    f = locate_facet(mesh, np.array([0.0, 0.5, 10.0]))
    contact = contact_on_mesh(mesh, f, tool)
    patch = processed_patch(mesh, contact, tool, n=12)
    d = patch.diameters()
    i_max = int(np.nanargmax(d))
    i_min = int(np.nanargmin(d))
    dir_max = patch.direction_at(patch.thetas[i_max])
    dir_min = patch.direction_at(patch.thetas[i_min])
    assert abs(dir_max[1]) > 0.96      # longest diameter along the generators
    assert abs(dir_min[1]) < 0.26      # shortest across them

    concave = cylinder_mesh(10.0, 24.0, 64, 16, inward=True)
    fc = locate_facet(concave, np.array([0.0, 0.5, 10.0]))
    cc = contact_on_mesh(concave, fc, tool)
    patch_c = processed_patch(concave, cc, tool, n=12)
    dc = patch_c.diameters()
    dir_min_c = patch_c.direction_at(patch_c.thetas[int(np.nanargmin(dc))])
    assert abs(dir_min_c[1]) > 0.96    # shortest diameters along the generators


def test_patch_points_on_mesh(flat_mesh, tool):
    from millpath.geom import closest_point_on_triangle

    f = locate_facet(flat_mesh, np.array([0.1, 0.1, 0.0]))
    contact = contact_on_mesh(flat_mesh, f, tool)
    patch = processed_patch(flat_mesh, contact, tool, n=8)
    for k in range(2 * 8):
        assert patch.valid[k]
        j = int(patch.facets[k])
        a, b, c = flat_mesh.facet_points(j)
        q = closest_point_on_triangle(patch.points[k], a, b, c)
        assert np.linalg.norm(q - patch.points[k]) < 1e-9


def test_patch_window_too_small_raises(flat_mesh, tool):
    f = locate_facet(flat_mesh, np.array([0.1, 0.1, 0.0]))
    contact = contact_on_mesh(flat_mesh, f, tool)
    with pytest.raises(ComputationError):
        processed_patch(flat_mesh, contact, tool, n=8, window_radius=1.0)


def test_patch_interpolation_roundtrip(flat_mesh, tool):
    f = locate_facet(flat_mesh, np.array([0.1, 0.1, 0.0]))
    contact = contact_on_mesh(flat_mesh, f, tool)
    patch = processed_patch(flat_mesh, contact, tool, n=12)
    for theta in (0.0, 0.4, math.pi / 2, 2.0, 5.5):
        s = patch.arc_pos_of_theta(theta)
        assert abs(patch.theta_of_arc_pos(s) - (theta % (2 * math.pi))) < 1e-9
    # node exactness
    for k in (0, 5, 13):
        np.testing.assert_allclose(patch.point_at_theta(patch.thetas[k]),
                                   patch.points[k], atol=1e-12)
