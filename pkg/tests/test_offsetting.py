"""Offset displacement, gap filling, trimming and interference reporting."""

import math

import numpy as np
import pytest

from millpath.errors import ComputationError
from millpath.geom import densify_polyline
from millpath.mesh import locate_facet, make_section_frames, plane_section
from millpath.offsetting import (
    detect_interference,
    min_distance_to_polyline,
    offset_segments,
    polyline_is_simple,
    raw_from_polyline,
    repair_offset,
)
from millpath.synthetic import sphere_sagitta

S2 = math.sqrt(2.0) / 2.0


def concave_v_section(section_builder):
    return section_builder([(-1, 1), (0, 0), (1, 1)], [(S2, S2), (-S2, S2)])


def convex_tent_section(section_builder):
    return section_builder([(-1, 0), (0, 1), (1, 0)], [(-S2, S2), (S2, S2)])


# ---------------------------------------------------------------------------
# raw displacement

def test_inplane_normal_displaces_by_epsilon(section_builder):
    sec = section_builder([(0, 0), (1, 0)], [(0, 1)])
    raw = offset_segments(sec, 0.75)
    np.testing.assert_allclose(raw[0].displacement, [0, 0.75], atol=1e-15)


def test_tilted_normal_displaces_by_cos_alpha(flat_frame, section_builder):
    # normal tilted 60 degrees out of the section plane
    from millpath.mesh import SectionPolyline

    n3 = np.array([[0.0, math.cos(math.radians(60)), math.sin(math.radians(60))]])
    sec = SectionPolyline(points=np.array([[0.0, 0], [1, 0]]), seg_facets=np.array([0]),
                          seg_normals=n3, frame=flat_frame)
    raw = offset_segments(sec, 1.0)
    assert abs(np.linalg.norm(raw[0].displacement) - 0.5) < 1e-12
    np.testing.assert_allclose(raw[0].displacement, [0, 0.5], atol=1e-12)


def test_normal_parallel_to_plane_skipped(flat_frame):
    from millpath.mesh import SectionPolyline

    n3 = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    sec = SectionPolyline(points=np.array([[0.0, 0], [1, 0], [2, 0]]),
                          seg_facets=np.array([0, 1]), seg_normals=n3, frame=flat_frame)
    raw = offset_segments(sec, 1.0)
    assert len(raw) == 1
    assert raw[0].source_index == 1


def test_flat_mesh_offsets_form_line_v_eps(coarse_flat_mesh):
    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frame = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)[0]
    sec = plane_section(coarse_flat_mesh, frame, 3.0, start_facet=f)
    raw = offset_segments(sec, 0.5)
    for seg in raw:
        assert abs(seg.p[1] - 0.5) < 1e-12 and abs(seg.q[1] - 0.5) < 1e-12


# ---------------------------------------------------------------------------
# repair: gaps and trims

def test_concave_v_trimmed_through_intersection(section_builder):
    sec = concave_v_section(section_builder)
    eps = S2
    raw = offset_segments(sec, eps)
    # independent oracle: intersection of the two offset lines
    # line A through raw[0].p with direction of the source segment
    a0, ad = raw[0].p, raw[0].q - raw[0].p
    b0, bd = raw[1].p, raw[1].q - raw[1].p
    M = np.array([ad, -bd]).T
    ts = np.linalg.solve(M, b0 - a0)
    expected = a0 + ts[0] * ad
    repaired = repair_offset(raw, eps)
    d = np.linalg.norm(repaired.points - expected, axis=1)
    assert d.min() < 1e-9
    np.testing.assert_allclose(expected, [0.0, 1.0], atol=1e-12)
    kinds = [e.kind for e in repaired.repair_log]
    assert kinds.count("trim") == 1


def test_convex_tent_arc_fill(section_builder):
    sec = convex_tent_section(section_builder)
    raw = offset_segments(sec, 0.5)
    repaired = repair_offset(raw, 0.5)
    apex = np.array([0.0, 1.0])
    arc_pts = [p for p, prov in zip(repaired.points, repaired.provenance)
               if prov[0] == "arc"]
    assert len(arc_pts) >= 17  # 90 degree gap sampled at <= 5 degree steps
    for p in arc_pts:
        assert abs(np.linalg.norm(p - apex) - 0.5) < 1e-9
    assert polyline_is_simple(repaired.points)


def test_straight_source_identity(section_builder):
    pts = [(x, 0.0) for x in np.linspace(-2, 2, 9)]
    normals = [(0.0, 1.0)] * 8
    sec = section_builder(pts, normals)
    raw = offset_segments(sec, 0.5)
    repaired = repair_offset(raw, 0.5)
    expected = np.array(pts) + [0, 0.5]
    np.testing.assert_allclose(repaired.points, expected, atol=1e-15)
    assert repaired.repair_log == []


def test_repair_idempotent(section_builder):
    sec = convex_tent_section(section_builder)
    repaired = repair_offset(offset_segments(sec, 0.5), 0.5)
    again = repair_offset(raw_from_polyline(repaired.points), 0.5)
    assert np.array_equal(again.points, repaired.points)


def test_offset_degenerate_flag(section_builder):
    # concave arc of radius 0.5 offset by 1.0: every offset segment crosses
    th = np.linspace(-1.2, 1.2, 25)
    pts = np.stack([0.5 * np.sin(th), 0.5 - 0.5 * np.cos(th)], axis=1)
    mid = 0.5 * (pts[:-1] + pts[1:])
    nrm = np.array([0.0, 0.5]) - mid
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    sec = section_builder(pts, nrm)
    repaired = repair_offset(offset_segments(sec, 1.0), 1.0)
    assert "offset-degenerate" in repaired.interference_flags
    assert polyline_is_simple(repaired.points)


def test_empty_raw_rejected():
    with pytest.raises(ComputationError):
        repair_offset([], 0.5)


# ---------------------------------------------------------------------------
# distance properties

def assert_distance_property(repaired, source_points, eps):
    """Vertices within [eps - tol, eps + sagitta]; chord interiors may dip by
    the arc sampling sagitta."""
    tol = 1e-6 * eps
    sagitta = eps * (1.0 - math.cos(math.radians(2.5)))
    vert_d = min_distance_to_polyline(repaired.points, source_points)
    assert vert_d.min() >= eps - tol
    assert vert_d.max() <= eps + sagitta + tol
    dense = densify_polyline(repaired.points, max_spacing=eps * 0.01)
    dense_d = min_distance_to_polyline(dense, source_points)
    assert dense_d.min() >= eps - sagitta - tol
    assert dense_d.max() <= eps + sagitta + tol


def test_distance_property_flat(coarse_flat_mesh):
    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frame = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)[0]
    sec = plane_section(coarse_flat_mesh, frame, 3.0, start_facet=f)
    repaired = repair_offset(offset_segments(sec, 0.5), 0.5)
    assert_distance_property(repaired, sec.points, 0.5)
    # planar identity: exact translate of the source
    np.testing.assert_allclose(repaired.points[:, 1], 0.5, atol=1e-9 * 0.5)


def test_distance_property_tent_and_v(section_builder):
    for sec, eps in ((convex_tent_section(section_builder), 0.5),
                     (concave_v_section(section_builder), S2)):
        repaired = repair_offset(offset_segments(sec, eps), eps)
        assert_distance_property(repaired, sec.points, eps)


def test_sphere_offset_oracle(sphere_mesh):
    eps = 0.5
    R = 20.0
    sag = sphere_sagitta(sphere_mesh, R)
    facet = 7
    P = sphere_mesh.facet_incenter(facet)
    N = sphere_mesh.facet_normals[facet]
    frames = make_section_frames(P, N, None, 6)
    for frame in frames:
        sec = plane_section(sphere_mesh, frame, 6.0, start_facet=facet)
        repaired = repair_offset(offset_segments(sec, eps), eps)
        pts3 = frame.to_world(repaired.points)
        radii = np.linalg.norm(pts3, axis=1)
        assert np.max(np.abs(radii - (R + eps))) < 2.0 * sag


# ---------------------------------------------------------------------------
# interference report

def test_clean_convex_report(section_builder):
    # smooth convex arc with exactly in-plane normals: clearance equals eps
    eps = 0.5
    R = 5.0
    th = np.linspace(-0.6, 0.6, 21)
    pts = np.stack([R * np.sin(th), R * np.cos(th) - R], axis=1)
    mid = 0.5 * (pts[:-1] + pts[1:])
    nrm = mid - np.array([0.0, -R])
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    sec = section_builder(pts, nrm)
    repaired = repair_offset(offset_segments(sec, eps), eps)
    report = detect_interference(repaired, sec)
    assert report.events == []
    assert abs(report.min_offset_distance - eps) < 1e-6 * eps


def test_sphere_mesh_report_clean_within_facet_tilt(sphere_mesh):
    # facet normals tilt out of the section plane by up to a facet size over
    # the sphere radius, which bounds the in-plane clearance deficit
    eps = 0.5
    facet = 3
    P = sphere_mesh.facet_incenter(facet)
    N = sphere_mesh.facet_normals[facet]
    frame = make_section_frames(P, N, None, 2)[0]
    sec = plane_section(sphere_mesh, frame, 5.0, start_facet=facet)
    repaired = repair_offset(offset_segments(sec, eps), eps)
    report = detect_interference(repaired, sec)
    assert report.events == []
    tilt = 1.5 * sphere_mesh.avg_edge_length / 20.0
    assert report.min_offset_distance >= eps * math.cos(tilt) - 1e-9
    assert report.min_offset_distance <= eps + 1e-9


def test_v_report_one_trim(section_builder):
    sec = concave_v_section(section_builder)
    repaired = repair_offset(offset_segments(sec, S2), S2)
    report = detect_interference(repaired, sec)
    assert len(report.events) == 1
    assert report.events[0].kind == "trim"
    np.testing.assert_allclose(report.events[0].location, [0.0, 1.0], atol=1e-12)


def test_degenerate_report_flag(section_builder):
    th = np.linspace(-1.2, 1.2, 25)
    pts = np.stack([0.5 * np.sin(th), 0.5 - 0.5 * np.cos(th)], axis=1)
    mid = 0.5 * (pts[:-1] + pts[1:])
    nrm = np.array([0.0, 0.5]) - mid
    nrm /= np.linalg.norm(nrm, axis=1)[:, None]
    sec = section_builder(pts, nrm)
    repaired = repair_offset(offset_segments(sec, 1.0), 1.0)
    report = detect_interference(repaired, sec)
    assert "offset-degenerate" in report.flags
    assert len(report.events) > 0
