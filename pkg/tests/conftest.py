"""Shared fixtures: synthetic meshes, tools, and a 2D section builder."""

import numpy as np
import pytest

from millpath.contact import ToolSpec
from millpath.mesh import SectionFrame, SectionPolyline
from millpath.synthetic import cylinder_mesh, grid_mesh, icosphere_mesh, octahedron_mesh


@pytest.fixture(scope="session")
def flat_mesh():
    return grid_mesh(8.0, 40, 40)


@pytest.fixture(scope="session")
def coarse_flat_mesh():
    return grid_mesh(4.0, 8, 8)


@pytest.fixture(scope="session")
def sphere_mesh():
    return icosphere_mesh(20.0, 3)


@pytest.fixture(scope="session")
def fine_sphere_mesh():
    return icosphere_mesh(20.0, 4)


@pytest.fixture(scope="session")
def cyl_mesh():
    return cylinder_mesh(50.0, 40.0, 160, 20)


@pytest.fixture(scope="session")
def octa_mesh():
    return octahedron_mesh()


@pytest.fixture
def tool():
    return ToolSpec(radius=5.0, tolerance=0.5)


@pytest.fixture
def flat_frame():
    """Synthetic in-plane frame: u right, v up, plane normal +z."""
    return SectionFrame(
        origin=np.zeros(3),
        u_axis=np.array([1.0, 0.0, 0.0]),
        v_axis=np.array([0.0, 1.0, 0.0]),
        plane_normal=np.array([0.0, 0.0, 1.0]),
    )


def make_section(frame, pts2d, normals2d):
    """SectionPolyline from 2D points and per-segment in-plane normals."""
    pts = np.asarray(pts2d, dtype=float)
    n2 = np.asarray(normals2d, dtype=float)
    n3 = np.stack([n2[:, 0], n2[:, 1], np.zeros(len(n2))], axis=1)
    return SectionPolyline(points=pts, seg_facets=np.arange(len(pts) - 1),
                           seg_normals=n3, frame=frame)


@pytest.fixture
def section_builder(flat_frame):
    def build(pts2d, normals2d):
        return make_section(flat_frame, pts2d, normals2d)
    return build
