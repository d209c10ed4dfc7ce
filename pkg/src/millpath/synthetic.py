"""Synthetic test meshes: flat grids, cylinders, geodesic spheres, saddles.

These generators exist for experiments and the test suite; vertices lie
exactly on the named surface so analytic oracles apply.
"""

from __future__ import annotations

import math

import numpy as np

from .mesh import TriMesh, build_mesh


def grid_mesh(half_extent: float = 8.0, nx: int = 32, ny: int = 32,
              height=None) -> TriMesh:
    """Regular triangulated grid over [-h, h]^2; optional height(x, y) field.

    Plain z=0 grid when height is None. Each cell splits along the same
    diagonal, normals point +z.
    """
    xs = np.linspace(-half_extent, half_extent, nx + 1)
    ys = np.linspace(-half_extent, half_extent, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = np.zeros_like(X) if height is None else np.vectorize(height)(X, Y)
    vertices = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)

    def vid(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append([a, b, c])
            tris.append([a, c, d])
    return build_mesh(vertices, np.asarray(tris))


def saddle_mesh(half_extent: float = 8.0, n: int = 32, coeff: float = 0.02) -> TriMesh:
    """Quadratic saddle z = coeff * (x^2 - y^2)."""
    return grid_mesh(half_extent, n, n, height=lambda x, y: coeff * (x * x - y * y))


def cylinder_mesh(radius: float = 10.0, length: float = 40.0, n_around: int = 48,
                  n_along: int = 10, arc: tuple[float, float] | None = None,
                  inward: bool = False) -> TriMesh:
    """Cylinder with axis along +y, top at angle 0 (x = 0, z = radius).

    arc restricts the angular range (open surface); None gives the full tube.
    inward flips the winding so facet normals point toward the axis, which is
    the concave machining side.
    """
    full = arc is None
    a0, a1 = (0.0, 2.0 * math.pi) if full else arc
    cols = n_around if full else n_around + 1
    angles = (a0 + (a1 - a0) * np.arange(cols) / n_around) if full \
        else np.linspace(a0, a1, cols)
    ys = np.linspace(-length / 2.0, length / 2.0, n_along + 1)
    verts = []
    for ang in angles:
        for y in ys:
            verts.append([radius * math.sin(ang), y, radius * math.cos(ang)])
    vertices = np.asarray(verts)

    def vid(i, j):
        return (i % cols if full else i) * (n_along + 1) + j

    tris = []
    for i in range(n_around):
        for j in range(n_along):
            a, b = vid(i, j), vid(i + 1, j)
            c, d = vid(i + 1, j + 1), vid(i, j + 1)
            tris.append([a, b, c])
            tris.append([a, c, d])
    tris = np.asarray(tris)
    if inward:
        tris = tris[:, ::-1]
    return build_mesh(vertices, tris)


def icosphere_mesh(radius: float = 20.0, subdivisions: int = 3) -> TriMesh:
    """Geodesic sphere from a subdivided icosahedron; vertices on the sphere."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    base = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    base /= np.linalg.norm(base[0])
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    verts = [v for v in base]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        k = cache.get(key)
        if k is None:
            m = verts[i] + verts[j]
            m = m / np.linalg.norm(m)
            verts.append(m)
            k = len(verts) - 1
            cache[key] = k
        return k

    for _ in range(subdivisions):
        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = np.asarray(new_faces, dtype=np.int64)
    vertices = radius * np.asarray(verts)
    return build_mesh(vertices, faces)


def sphere_sagitta(mesh: TriMesh, radius: float) -> float:
    """Max height of the sphere above the mesh facets (chord error)."""
    tri = mesh.vertices[mesh.triangles]
    centroids = tri.mean(axis=1)
    # distance from the center (origin) to each facet plane
    d = np.abs(np.einsum("ij,ij->i", centroids, mesh.facet_normals))
    return float(radius - d.min())


def octahedron_mesh(radius: float = 1.0) -> TriMesh:
    vertices = radius * np.array([
        [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1],
    ], dtype=float)
    triangles = np.array([
        [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
        [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
    ], dtype=np.int64)
    return build_mesh(vertices, triangles)


def tetrahedron_mesh(scale: float = 1.0) -> TriMesh:
    vertices = scale * np.array([
        [1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1],
    ], dtype=float)
    triangles = np.array([
        [0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2],
    ], dtype=np.int64)
    return build_mesh(vertices, triangles)
