"""Mesh ingestion, adjacency, section frames and plane sections."""

import math
import struct

import numpy as np
import pytest

from millpath.errors import InputError, MeshError
from millpath.mesh import (
    build_mesh,
    facet_normal,
    geodesic_walk,
    load_mesh,
    make_section_frames,
    plane_section,
    weld_vertices,
    write_obj,
)
from millpath.synthetic import cylinder_mesh, tetrahedron_mesh


def write_stl_ascii(path, triangles):
    with open(path, "w") as fh:
        fh.write("solid test\n")
        for tri in triangles:
            fh.write("facet normal 0 0 0\nouter loop\n")
            for v in tri:
                fh.write(f"vertex {v[0]} {v[1]} {v[2]}\n")
            fh.write("endloop\nendfacet\n")
        fh.write("endsolid test\n")


def write_stl_binary(path, triangles):
    with open(path, "wb") as fh:
        fh.write(b"\0" * 80)
        fh.write(struct.pack("<I", len(triangles)))
        for tri in triangles:
            fh.write(struct.pack("<3f", 0, 0, 0))
            for v in tri:
                fh.write(struct.pack("<3f", *v))
            fh.write(struct.pack("<H", 0))


def test_load_obj_single_triangle(tmp_path):
    p = tmp_path / "tri.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    mesh = load_mesh(p)
    assert mesh.n_facets == 1
    np.testing.assert_allclose(mesh.facet_normals[0], [0, 0, 1], atol=1e-15)


def test_load_stl_ascii_welds_duplicates(tmp_path):
    p = tmp_path / "two.stl"
    tri1 = [(0, 0, 0), (1, 0, 0), (0, 1, 0)]
    tri2 = [(1, 0, 0), (1, 1, 0), (0, 1, 0)]
    write_stl_ascii(p, [tri1, tri2])
    mesh = load_mesh(p)
    assert mesh.n_facets == 2
    assert len(mesh.vertices) == 4  # shared edge vertices welded
    assert mesh.interior_edge_count() == 1


def test_load_stl_single_triangle_unique_vertices(tmp_path):
    p = tmp_path / "one.stl"
    write_stl_ascii(p, [[(0, 0, 0), (1, 0, 0), (0, 1, 0)]])
    mesh = load_mesh(p)
    assert len(mesh.vertices) == 3


def test_octahedron_stl_adjacency_brute_force(tmp_path, octa_mesh):
    # round-trip through binary STL, then enumerate edges exhaustively
    tris = octa_mesh.vertices[octa_mesh.triangles]
    p = tmp_path / "octa.stl"
    write_stl_binary(p, tris)
    mesh = load_mesh(p)
    assert mesh.n_facets == 8
    # brute-force undirected edge enumeration
    edges = set()
    for tri in mesh.triangles:
        for k in range(3):
            a, b = int(tri[k]), int(tri[(k + 1) % 3])
            edges.add((min(a, b), max(a, b)))
    assert len(edges) == 12
    assert mesh.interior_edge_count() == 12
    # adjacency is an involution on interior edges
    adj = mesh.adjacency
    for f in range(mesh.n_facets):
        for k in range(3):
            twin = adj[f, k]
            assert twin >= 0
            assert adj[twin // 3, twin % 3] == 3 * f + k


def test_non_manifold_rejected():
    vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0]], float)
    triangles = np.array([[0, 1, 2], [1, 0, 3], [0, 1, 4]])
    with pytest.raises(MeshError, match="non-manifold|oriented"):
        build_mesh(vertices, triangles)


def test_inconsistent_orientation_rejected():
    vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], float)
    # shared edge 1->2 appears in the same direction in both triangles
    triangles = np.array([[0, 1, 2], [1, 2, 3]])
    with pytest.raises(MeshError, match="oriented"):
        build_mesh(vertices, triangles)


def test_degenerate_facet_rejected():
    vertices = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0]], float)
    triangles = np.array([[0, 1, 2], [0, 1, 3]])
    with pytest.raises(MeshError, match="degenerate"):
        build_mesh(vertices, triangles)


def test_facet_normal_windings():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], float)
    mesh = build_mesh(v, np.array([[0, 1, 2]]))
    np.testing.assert_allclose(facet_normal(mesh, 0), [0, 0, 1], atol=1e-15)
    mesh2 = build_mesh(v, np.array([[0, 2, 1]]))
    np.testing.assert_allclose(facet_normal(mesh2, 0), [0, 0, -1], atol=1e-15)
    with pytest.raises(InputError):
        facet_normal(mesh, 5)


def test_tetrahedron_face_normals_analytic():
    mesh = tetrahedron_mesh()
    # for this vertex set the plane through any three vertices has normal
    # along minus the opposite vertex
    for tri in mesh.triangles:
        others = set(range(4)) - set(int(i) for i in tri)
        opposite = mesh.vertices[others.pop()]
        expected = -opposite / np.linalg.norm(opposite)
        j = [k for k in range(mesh.n_facets)
             if set(int(i) for i in mesh.triangles[k]) == set(int(i) for i in tri)][0]
        np.testing.assert_allclose(mesh.facet_normals[j], expected, atol=1e-12)


def test_weld_tolerance():
    v = np.array([[0, 0, 0], [1, 0, 0], [1e-12, 0, 0]])
    t = np.array([[0, 1, 2]])
    nv, nt = weld_vertices(v, t)
    assert len(nv) == 2


def test_obj_writer_roundtrip(tmp_path, coarse_flat_mesh):
    p = tmp_path / "grid.obj"
    write_obj(p, coarse_flat_mesh.vertices, coarse_flat_mesh.triangles)
    mesh = load_mesh(p)
    assert mesh.n_facets == coarse_flat_mesh.n_facets


# ---------------------------------------------------------------------------
# section frames

def test_frames_orthogonal_pair():
    frames = make_section_frames(np.zeros(3), np.array([0.0, 0, 1]),
                                 np.array([1.0, 0, 0]), 2)
    n0 = frames[0].plane_normal
    n1 = frames[1].plane_normal
    assert min(np.linalg.norm(n0 - [0, -1, 0]), np.linalg.norm(n0 - [0, 1, 0])) < 1e-12
    assert min(np.linalg.norm(n1 - [1, 0, 0]), np.linalg.norm(n1 - [-1, 0, 0])) < 1e-12


def test_frames_equal_spacing_n12():
    frames = make_section_frames(np.zeros(3), np.array([0.0, 0, 1]),
                                 np.array([1.0, 0, 0]), 12)
    assert len(frames) == 12  # 24 boundary directions
    for a, b in zip(frames, frames[1:]):
        ang = math.acos(np.clip(np.dot(a.u_axis, b.u_axis), -1, 1))
        assert abs(ang - math.pi / 12) < 1e-9


def test_frames_invariants_and_reproducibility():
    P = np.array([0.3, -0.2, 1.7])
    N = np.array([0.1, 0.2, 0.97])
    N /= np.linalg.norm(N)
    frames1 = make_section_frames(P, N, np.array([1.0, 0, 0]), 7)
    frames2 = make_section_frames(P, N, np.array([1.0, 0, 0]), 7)
    for f1, f2 in zip(frames1, frames2):
        assert np.array_equal(f1.u_axis, f2.u_axis)
        assert np.array_equal(f1.plane_normal, f2.plane_normal)
    for f in frames1:
        # right-handed orthonormal triple and in-plane normal
        np.testing.assert_allclose(np.cross(f.u_axis, f.v_axis), f.plane_normal, atol=1e-10)
        assert abs(np.dot(N, f.plane_normal)) < 1e-10
        assert abs(np.linalg.norm(f.u_axis) - 1) < 1e-12


def test_frames_parallel_seed_fallback():
    frames = make_section_frames(np.zeros(3), np.array([0.0, 0, 1]),
                                 np.array([0.0, 0, 2.0]), 4)
    assert len(frames) == 4
    for f in frames:
        assert abs(np.dot(f.u_axis, [0, 0, 1])) < 1e-12


# ---------------------------------------------------------------------------
# plane sections

def test_flat_section_straight_through_origin(coarse_flat_mesh):
    from millpath.mesh import locate_facet

    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frames = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)
    sec = plane_section(coarse_flat_mesh, frames[0], 3.0, start_facet=f)
    assert np.all(np.abs(sec.points[:, 1]) < 1e-9)  # straight line v = 0
    assert np.min(np.abs(sec.points[:, 0])) < 3.0  # passes the origin region
    u = sec.points[:, 0]
    assert u[0] < 0 < u[-1]


def test_tiny_window_single_segment(coarse_flat_mesh):
    from millpath.mesh import locate_facet

    P = np.array([0.05, 0.03, 0.0])
    f = locate_facet(coarse_flat_mesh, P)
    frames = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)
    sec = plane_section(coarse_flat_mesh, frames[0], 1e-3, start_facet=f)
    assert sec.n_segments == 1


def test_cylinder_section_matches_circle():
    mesh = cylinder_mesh(10.0, 20.0, 96, 8)
    from millpath.mesh import locate_facet

    P0 = np.array([0.0, 1.0, 10.0])
    f = locate_facet(mesh, P0)
    P = mesh.facet_incenter(f)
    N = mesh.facet_normals[f]
    frames = make_section_frames(P, N, np.array([1.0, 0, 0]), 2)
    # pick the frame cutting across the generators (plane normal ~ +-y)
    frame = min(frames, key=lambda fr: abs(abs(fr.plane_normal[1]) - 1.0))
    sec = plane_section(mesh, frame, 6.0, start_facet=f)
    pts3 = frame.to_world(sec.points)
    radii = np.hypot(pts3[:, 0], pts3[:, 2])
    sagitta = 10.0 * (1.0 - math.cos(math.pi / 96))
    assert np.all(np.abs(radii - 10.0) < 2.0 * sagitta + 1e-9)


def test_walk_count_matches_brute_force(octa_mesh, sphere_mesh):
    # every triangle cut by the plane in a proper segment must be visited
    # exactly once; single-vertex touches carry no segment
    for mesh, facet in ((octa_mesh, 0), (sphere_mesh, 17)):
        P = mesh.facet_incenter(facet)
        N = mesh.facet_normals[facet]
        frames = make_section_frames(P, N, None, 3)
        for frame in frames:
            sec = plane_section(mesh, frame, 1e9, start_facet=facet)
            d = (mesh.vertices - P) @ frame.plane_normal
            above = d >= 0.0
            straddle = 0
            for tri in mesh.triangles:
                flags = above[tri]
                if not (flags.any() and not flags.all()):
                    continue
                crossings = []
                for k in range(3):
                    a, b = int(tri[k]), int(tri[(k + 1) % 3])
                    if above[a] != above[b]:
                        t = d[a] / (d[a] - d[b])
                        crossings.append(mesh.vertices[a]
                                         + t * (mesh.vertices[b] - mesh.vertices[a]))
                assert len(crossings) == 2
                if np.linalg.norm(crossings[1] - crossings[0]) > 1e-12 * mesh.bbox_diag:
                    straddle += 1
            assert sec.n_segments == straddle
            assert len(np.unique(sec.seg_facets)) == sec.n_segments
            assert sec.closed


def test_section_chained_and_on_plane(sphere_mesh):
    P = sphere_mesh.facet_incenter(5)
    N = sphere_mesh.facet_normals[5]
    frames = make_section_frames(P, N, None, 4)
    sec = plane_section(sphere_mesh, frames[1], 8.0, start_facet=5)
    # consecutive segments share endpoints exactly (computed once per edge)
    assert sec.n_segments >= 3
    pts3 = frames[1].to_world(sec.points)
    d = (pts3 - P) @ frames[1].plane_normal
    assert np.max(np.abs(d)) < 1e-9 * sphere_mesh.bbox_diag


def test_section_truncates_at_boundary(coarse_flat_mesh):
    P = np.array([0.05, 0.03, 0.0])
    frames = make_section_frames(P, np.array([0.0, 0, 1]), np.array([1.0, 0, 0]), 2)
    sec = plane_section(coarse_flat_mesh, frames[0], 1e9)
    assert sec.truncated_start and sec.truncated_end
    assert not sec.closed


# ---------------------------------------------------------------------------
# geodesic walking

def test_geodesic_walk_flat(coarse_flat_mesh):
    from millpath.mesh import locate_facet

    f = locate_facet(coarse_flat_mesh, np.array([0.1, 0.1, 0.0]))
    origin = coarse_flat_mesh.facet_incenter(f)
    direction = np.array([1.0, 0.4, 0.0])
    direction /= np.linalg.norm(direction)
    end, _, done = geodesic_walk(coarse_flat_mesh, f, origin, direction, 2.5)
    assert done
    np.testing.assert_allclose(end, origin + 2.5 * direction, atol=1e-9)


def test_geodesic_walk_exits_boundary(coarse_flat_mesh):
    from millpath.mesh import locate_facet

    f = locate_facet(coarse_flat_mesh, np.array([3.9, 0.0, 0.0]))
    origin = coarse_flat_mesh.facet_incenter(f)
    end, _, done = geodesic_walk(coarse_flat_mesh, f, origin,
                                 np.array([1.0, 0.0, 0.0]), 10.0)
    assert not done


def test_geodesic_walk_unrolls_cylinder():
    mesh = cylinder_mesh(10.0, 30.0, 128, 10)
    from millpath.mesh import locate_facet

    f = locate_facet(mesh, np.array([0.0, 0.5, 10.0]))
    origin = mesh.facet_incenter(f)
    N = mesh.facet_normals[f]
    circ = np.cross(np.array([0.0, 1.0, 0.0]), N)
    circ /= np.linalg.norm(circ)
    rho = 4.0
    end, _, done = geodesic_walk(mesh, f, origin, circ, rho)
    assert done
    # chord of the unrolled arc: 2 R sin(rho / 2R), up to mesh faceting
    chord = np.linalg.norm(end - origin)
    expected = 2.0 * 10.0 * math.sin(rho / (2.0 * 10.0))
    assert abs(chord - expected) < 0.02 * expected
