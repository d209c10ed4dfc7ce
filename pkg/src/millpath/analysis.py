"""Patch diameter analysis and disc-based principal direction estimates.

The moving rule needs directions only: the widest machined stripe runs
perpendicular to the largest patch diameter, which on smooth surfaces is
close to the principal direction of maximal normal curvature. The disc
method estimates the same directions independently of any tool by walking
geodesics of a fixed surface radius in 2n directions and comparing the 3D
chords of opposite endpoints: bending shortens a chord, so the minimal
chord marks the direction of maximal curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contact import PatchBoundary
from .errors import ComputationError, InputError
from .geom import perpendicular_in_plane, unit
from .mesh import TriMesh, geodesic_walk

# Diameters within this relative tolerance of the maximum count as tied and
# the tie breaks toward the smallest angle.
DIAMETER_TIE_REL = 1e-9


@dataclass(frozen=True)
class DirectionOnSurface:
    """Unit tangent-plane direction with its angle from the patch u0 axis."""

    vector: np.ndarray
    theta: float

    @classmethod
    def at_theta(cls, patch: PatchBoundary, theta: float) -> "DirectionOnSurface":
        return cls(vector=patch.direction_at(theta), theta=float(theta))

    def flipped(self) -> "DirectionOnSurface":
        return DirectionOnSurface(vector=-self.vector, theta=self.theta + math.pi)


def largest_diameter(patch: PatchBoundary) -> tuple[DirectionOnSurface, float]:
    """Longest frame diameter of the patch and its tangent direction.

    Near ties break toward the smallest angle, which keeps the result stable
    on symmetric patches.
    """
    diam = patch.diameters()
    ok = ~np.isnan(diam)
    if int(ok.sum()) < 2:
        raise ComputationError("fewer than 2 valid patch diameters")
    dmax = float(np.nanmax(diam))
    tied = np.nonzero(ok & (diam >= dmax * (1.0 - DIAMETER_TIE_REL)))[0]
    i = int(tied.min())
    theta = float(patch.thetas[i])
    return DirectionOnSurface.at_theta(patch, theta), float(diam[i])


def widest_stripe_direction(patch: PatchBoundary) -> DirectionOnSurface:
    """Tangent direction perpendicular to the largest diameter, theta in [0, pi)."""
    d, _ = largest_diameter(patch)
    theta = (d.theta + math.pi / 2.0) % math.pi
    return DirectionOnSurface.at_theta(patch, theta)


@dataclass(frozen=True)
class DiscDirections:
    """Disc-method curvature direction estimate at a facet."""

    max_curvature_dir: np.ndarray   # direction of the minimal chord
    min_curvature_dir: np.ndarray   # direction of the maximal chord
    chord_max: float
    chord_min: float
    theta_max_curvature: float
    theta_min_curvature: float
    chords: np.ndarray              # (n,) per diagonal, NaN where unusable


def write_direction_field_csv(path, mesh: TriMesh, facets, disc_radius: float | None = None,
                              n_directions: int = 12) -> int:
    """Disc-method direction field over the given facets as CSV.

    Columns: facet id, angles of the max/min curvature directions in the
    facet tangent frame, and the min/max chord ratio. Facets whose disc walk
    fails are skipped; returns the number of rows written.
    """
    rows = []
    for j in facets:
        try:
            res = disc_principal_directions(mesh, j, disc_radius, n_directions)
        except (InputError, ComputationError):
            continue
        ratio = res.chord_min / res.chord_max if res.chord_max > 0 else float("nan")
        rows.append(f"{int(j)},{res.theta_max_curvature:.9g},"
                    f"{res.theta_min_curvature:.9g},{ratio:.9g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("facet,theta_max_curvature,theta_min_curvature,chord_ratio\n")
        for row in rows:
            fh.write(row + "\n")
    return len(rows)


def disc_principal_directions(mesh: TriMesh, facet: int, disc_radius: float | None = None,
                              n_directions: int = 12) -> DiscDirections:
    """Estimate principal directions by laying a disc of geodesic radius onto
    the mesh around the facet incenter.

    Walks 2*n_directions geodesics of length disc_radius; each opposite pair
    forms a curved diagonal whose 3D endpoint chord is compared. Diagonals
    whose walk leaves the mesh are skipped; fewer than 3 usable diagonals is
    an error. Facet normals stand in for surface normals, so the method also
    works when every mesh vertex lies on the surface boundary.
    """
    if disc_radius is None:
        disc_radius = 3.0 * mesh.avg_edge_length
    if disc_radius <= mesh.avg_edge_length:
        raise InputError(
            f"disc radius {disc_radius:g} must exceed the average edge length "
            f"{mesh.avg_edge_length:g}")
    origin = mesh.facet_incenter(facet)
    normal = mesh.facet_normals[facet]
    u0 = perpendicular_in_plane(normal, None)
    w0 = np.cross(normal, u0)
    n = n_directions
    endpoints = np.full((2 * n, 3), np.nan)
    for k in range(2 * n):
        theta = math.pi * k / n
        d = math.cos(theta) * u0 + math.sin(theta) * w0
        end, _, completed = geodesic_walk(mesh, facet, origin, d, disc_radius)
        if completed:
            endpoints[k] = end
    chords = np.full(n, np.nan)
    for i in range(n):
        a, b = endpoints[i], endpoints[i + n]
        if not (np.any(np.isnan(a)) or np.any(np.isnan(b))):
            chords[i] = float(np.linalg.norm(a - b))
    usable = int(np.count_nonzero(~np.isnan(chords)))
    if usable < 3:
        raise ComputationError(
            f"only {usable} usable disc diagonals at facet {facet}; mesh too small "
            "for this disc radius")
    i_min = int(np.nanargmin(chords))
    i_max = int(np.nanargmax(chords))
    th_min = math.pi * i_min / n
    th_max = math.pi * i_max / n
    dir_at = lambda th: unit(math.cos(th) * u0 + math.sin(th) * w0)
    return DiscDirections(
        max_curvature_dir=dir_at(th_min),
        min_curvature_dir=dir_at(th_max),
        chord_max=float(chords[i_max]),
        chord_min=float(chords[i_min]),
        theta_max_curvature=th_min,
        theta_min_curvature=th_max,
        chords=chords,
    )
