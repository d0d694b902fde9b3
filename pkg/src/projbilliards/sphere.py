"""Billiards on the unit sphere and their tautological projection.

Geodesics are great circles, stored as the unit normal of the plane
through the origin that carries them.  The projection S^2 -> RP^2 sends a
point to its homogeneous class and a great circle with plane normal n to
the projective line with coefficients n; the normal framing of a great
circle projects to the pencil of lines through the image of its pole.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateConfiguration
from .projective import PLine, PPoint


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise DegenerateConfiguration("zero vector has no direction")
    return v / n


def spherical_project(x) -> PPoint:
    """Tautological projection: unit vector (x, y, z) -> [x : y : z]."""
    x = np.asarray(x, dtype=float)
    return PPoint((float(x[0]), float(x[1]), float(x[2])))


def great_circle_line(normal) -> PLine:
    """Projective line carrying the image of the great circle {n.x = 0}."""
    n = _unit(normal)
    return PLine((float(n[0]), float(n[1]), float(n[2])))


def pole_frame_line(p, mirror_normal) -> PLine:
    """Image of the geodesic through p orthogonal to the mirror circle:
    the line joining [p] to the image of the mirror's pole."""
    n = np.cross(np.asarray(p, dtype=float), _unit(mirror_normal))
    return PLine(tuple(float(c) for c in _unit(n)))


def geodesic_through(p, direction):
    """Plane normal of the great circle through p with tangent direction."""
    return _unit(np.cross(np.asarray(p, dtype=float), _unit(direction)))


def spherical_reflect(geodesic_normal, at, mirror_normal):
    """Mirror law for geodesics: reflect the tangent of the incoming
    geodesic at `at` across the mirror circle's tangent in T_at S^2."""
    p = _unit(at)
    u = _unit(np.cross(geodesic_normal, p))
    w = _unit(np.cross(mirror_normal, p))
    u_ref = 2.0 * float(np.dot(u, w)) * w - u
    return geodesic_through(p, u_ref)


def mirror_crossings(p, u, mirror_normal, min_arc: float = 1e-9):
    """Crossings of the geodesic x(s) = p cos s + u sin s with the mirror
    circle over one period, as (point, tangent, arc length) triples."""
    p = _unit(p)
    u = _unit(u)
    m = _unit(mirror_normal)
    a = float(np.dot(m, p))
    b = float(np.dot(m, u))
    if math.hypot(a, b) < 1e-14:
        raise DegenerateConfiguration("geodesic lies inside the mirror circle")
    s0 = math.atan2(-a, b) % math.pi
    out = []
    for s in (s0, s0 + math.pi):
        if s <= min_arc or s >= 2.0 * math.pi - min_arc:
            continue
        q = p * math.cos(s) + u * math.sin(s)
        uq = -p * math.sin(s) + u * math.cos(s)
        out.append((_unit(q), _unit(uq), s))
    return out


def advance_to_mirror(p, u, mirror_normal):
    """First crossing of the geodesic with the mirror circle."""
    crossings = mirror_crossings(p, u, mirror_normal)
    if not crossings:
        raise DegenerateConfiguration("no forward crossing with the mirror")
    return min(crossings, key=lambda c: c[2])


OCTANT_MIRRORS = (
    np.array([0.0, 0.0, 1.0]),   # great circle z = 0
    np.array([0.0, 1.0, 0.0]),   # great circle y = 0
    np.array([1.0, 0.0, 0.0]),   # great circle x = 0
)


def _in_octant(p, tol=1e-9) -> bool:
    return bool(np.all(np.asarray(p) >= -tol))


def octant_orbit(p0, u0, bounces: int = 3):
    """Trace a billiard trajectory inside the right-angled spherical
    triangle cut out by the three pairwise orthogonal great circles.

    Returns the list of (point, mirror_index) impacts and the final
    (point, tangent) state.  Starting data must sit on a mirror circle
    with the tangent pointing into the positive octant.
    """
    p = _unit(p0)
    u = _unit(u0)
    impacts = []
    for _ in range(bounces):
        best = None
        for idx, m in enumerate(OCTANT_MIRRORS):
            try:
                crossings = mirror_crossings(p, u, m)
            except DegenerateConfiguration:
                continue
            for q, uq, s in crossings:
                if not _in_octant(q):
                    continue
                if best is None or s < best[3]:
                    best = (q, uq, idx, s)
        if best is None:
            raise DegenerateConfiguration("trajectory left the octant")
        q, uq, idx, _ = best
        w = _unit(np.cross(OCTANT_MIRRORS[idx], q))
        u = 2.0 * float(np.dot(uq, w)) * w - uq
        p = q
        impacts.append((q, idx))
    return impacts, (p, u)


def random_octant_start(rng):
    """Random point on the z = 0 side of the octant triangle with a
    direction pointing into the triangle."""
    phi = rng.uniform(0.15, math.pi / 2 - 0.15)
    p = np.array([math.cos(phi), math.sin(phi), 0.0])
    w = np.cross(np.array([0.0, 0.0, 1.0]), p)
    psi = rng.uniform(-math.pi / 2 + 0.25, math.pi / 2 - 0.25)
    u = math.cos(psi) * np.array([0.0, 0.0, 1.0]) + math.sin(psi) * w
    return p, _unit(u)
