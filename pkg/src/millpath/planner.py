"""Moving-direction selection: isophote point, beta and blended directions.

The inclination of a point is the angle between its surface normal and the
tool axis. The boundary point whose inclination best matches the contact's
marks where the isophote through the contact leaves the patch. beta is the
inclination difference between the widest-stripe boundary point W and that
isophote point S; the blended direction q sits on the boundary arc from W
toward S at arc length (1 - cos(beta)) times the W-to-S arc, so a vanishing
beta keeps the widest-stripe direction and beta = 90 degrees goes fully to
the isophote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import DirectionOnSurface, widest_stripe_direction
from .contact import PatchBoundary
from .errors import ComputationError
from .geom import clamped_arccos, wrap_angle

# Residuals within this absolute tolerance (radians) of the best one count as
# tied; ties break toward the widest-stripe direction.
RESIDUAL_TIE_ABS = 1e-12


def inclination(N: np.ndarray, a: np.ndarray) -> float:
    """Angle in [0, pi] between a surface normal and the tool axis."""
    return clamped_arccos(float(np.dot(N, a)))


@dataclass(frozen=True)
class IsophotePoint:
    index: int
    residual: float
    theta: float
    position: np.ndarray
    normal: np.ndarray


def isophote_point(patch: PatchBoundary, a: np.ndarray,
                   w_theta: float | None = None) -> IsophotePoint:
    """Boundary point whose inclination is closest to the contact's.

    Ties (flat regions, symmetric patches) break toward the smallest angular
    distance from the widest-stripe direction, so a flat patch returns the
    boundary point in the stripe direction itself.
    """
    a = np.asarray(a, dtype=float)
    idx = np.nonzero(patch.valid)[0]
    if len(idx) == 0:
        raise ComputationError("patch has no valid boundary normals")
    if w_theta is None:
        w_theta = widest_stripe_direction(patch).theta
    ref = inclination(patch.contact.normal, a)
    residuals = np.array([abs(inclination(patch.normals[k], a) - ref) for k in idx])
    best = float(residuals.min())
    tied = idx[residuals <= best + RESIDUAL_TIE_ABS]
    ang = np.abs([wrap_angle(patch.thetas[k] - w_theta) for k in tied])
    k = int(tied[int(np.argmin(ang))])
    return IsophotePoint(
        index=k,
        residual=float(abs(inclination(patch.normals[k], a) - ref)),
        theta=float(patch.thetas[k]),
        position=patch.points[k].copy(),
        normal=patch.normals[k].copy(),
    )


def beta(patch: PatchBoundary, w_index: int, s_index: int, a: np.ndarray) -> float:
    """Inclination difference between boundary points W and S, in [0, pi]."""
    a = np.asarray(a, dtype=float)
    return abs(inclination(patch.normals[w_index], a)
               - inclination(patch.normals[s_index], a))


def blended_direction(patch: PatchBoundary, w: DirectionOnSurface, s_index: int,
                      beta_value: float) -> DirectionOnSurface:
    """Direction q on the boundary arc from W toward S at the blend ratio.

    The target angle interpolates the boundary's angle table by arc length
    along the shorter W-to-S arc: arc(q, w) = (1 - cos(beta)) * arc(s, w).
    beta = 0 returns w unchanged.
    """
    factor = 1.0 - math.cos(beta_value)
    if factor <= 0.0:
        return w
    total = patch.arc_total()
    s_w = patch.arc_pos_of_theta(w.theta)
    s_s = patch.arc_pos_of_theta(patch.thetas[s_index])
    forward = (s_s - s_w) % total
    backward = forward - total  # negative
    delta = forward if forward <= -backward else backward
    if delta == 0.0:
        return w
    target = (s_w + factor * delta) % total
    theta_q = patch.theta_of_arc_pos(target)
    return DirectionOnSurface.at_theta(patch, theta_q)


@dataclass(frozen=True)
class BisectorPair:
    b1: DirectionOnSurface
    b2: DirectionOnSurface
    degenerate: bool


def bisector_directions(patch: PatchBoundary, w_theta: float, s1_theta: float,
                        s2_theta: float) -> BisectorPair:
    """Tangent-plane bisectors of the angles (W, P, S1) and (W, P, S2).

    Coincident isophote points collapse to a single direction, flagged
    degenerate.
    """
    th1 = w_theta + 0.5 * wrap_angle(s1_theta - w_theta)
    th2 = w_theta + 0.5 * wrap_angle(s2_theta - w_theta)
    degenerate = abs(wrap_angle(s1_theta - s2_theta)) < 1e-12
    return BisectorPair(
        b1=DirectionOnSurface.at_theta(patch, th1),
        b2=DirectionOnSurface.at_theta(patch, th2),
        degenerate=degenerate,
    )


def isophote_points_on_halves(patch: PatchBoundary, a: np.ndarray,
                              w_theta: float) -> tuple[IsophotePoint, IsophotePoint]:
    """Best isophote residual minimum on each side of the stripe diameter.

    The boundary splits at the widest-stripe direction and its antipode; one
    minimum is picked per half (the bisector strategy needs both crossings).
    """
    a = np.asarray(a, dtype=float)
    ref = inclination(patch.contact.normal, a)
    halves: dict[int, tuple[float, int]] = {}
    for k in np.nonzero(patch.valid)[0]:
        rel = wrap_angle(patch.thetas[k] - w_theta)
        side = 0 if rel >= 0.0 else 1
        res = abs(inclination(patch.normals[k], a) - ref)
        if side not in halves or res < halves[side][0]:
            halves[side] = (res, int(k))
    if len(halves) < 2:
        raise ComputationError("patch boundary does not cover both stripe sides")

    def make(side: int) -> IsophotePoint:
        res, k = halves[side]
        return IsophotePoint(index=k, residual=res, theta=float(patch.thetas[k]),
                             position=patch.points[k].copy(),
                             normal=patch.normals[k].copy())

    return make(0), make(1)
