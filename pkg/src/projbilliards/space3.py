"""Reflection law and orbit planarity in projective 3-space.

Points are homogeneous 4-tuples, planes are covectors, and a line is an
ordered pair of distinct points spanning it.  Two lines through a surface
point are symmetric w.r.t. the frame line and tangent plane when they span
a common 2-plane with the frame and form a harmonic quadruple with the
frame and the trace of the tangent plane in that 2-plane; every genuine
3-periodic orbit then keeps all six of its lines inside the plane of its
vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CollinearVertices,
    DegenerateFrame,
    NotThroughPoint,
)
from .projective import P1Value, p1_equal, reflect_azimuth
from .scalars import all_exact, mag


@dataclass(frozen=True)
class Line3:
    """Projective line in 3-space as an ordered pair of spanning points."""

    p: tuple
    q: tuple


def affine_point3(x, y, z) -> tuple:
    one = 1 if all_exact((x, y, z)) else 1.0
    return (one, x, y, z)


def dot4(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]


def _norm4(a) -> float:
    return max(float(mag(c)) for c in a)


def _det3(rows):
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def plane_through(a, b, c) -> tuple:
    """Covector of the plane spanned by three points (CollinearVertices
    when they do not span a plane)."""
    coeffs = []
    for k in range(4):
        cols = [j for j in range(4) if j != k]
        minor = _det3([[p[j] for j in cols] for p in (a, b, c)])
        coeffs.append(minor if k % 2 == 0 else -minor)
    scale = _norm4(a) * _norm4(b) * _norm4(c)
    if max(abs(x) for x in coeffs) <= 1e-12 * scale:
        raise CollinearVertices("three collinear points span no plane")
    return tuple(coeffs)


def point_plane_defect(x, plane) -> float:
    """Scale-invariant incidence defect of a point against a plane."""
    return float(abs(dot4(x, plane))) / (_norm4(x) * _norm4(plane))


def line_plane_defect(l: Line3, plane) -> float:
    return max(point_plane_defect(l.p, plane), point_plane_defect(l.q, plane))


def other_point(l: Line3, at) -> tuple:
    """A spanning point of l projectively distinct from `at`."""
    for cand in (l.p, l.q):
        indep = False
        for i in range(4):
            for j in range(i + 1, 4):
                d = cand[i] * at[j] - cand[j] * at[i]
                if abs(d) > 1e-12 * _norm4(cand) * _norm4(at):
                    indep = True
        if indep:
            return cand
    raise NotThroughPoint("line degenerates to the base point")


def line_through_point_defect(l: Line3, at) -> float:
    """How far `at` is from the span of l (0 when at lies on l)."""
    import numpy as np

    m = np.array([l.p, l.q], dtype=float)
    x = np.array(at, dtype=float)
    q, _ = np.linalg.qr(m.T)
    res = x - q @ (q.T @ x)
    return float(np.linalg.norm(res) / np.linalg.norm(x))


def reflect_nd(at, incoming: Line3, frame: Line3, tangent_plane) -> Line3:
    """Reflect a line at a surface point of a framed hypersurface.

    The incoming line and the frame span a 2-plane; its trace in the
    tangent plane is the tangent line of the reflection, and the outgoing
    line is the harmonic conjugate inside that 2-plane.  An incoming line
    equal to the frame reflects to the frame itself (the degenerate
    convention of the planar law).
    """
    if line_through_point_defect(incoming, at) > 1e-9:
        raise NotThroughPoint("incoming line misses the reflection point")
    if line_through_point_defect(frame, at) > 1e-9:
        raise NotThroughPoint("frame line misses the reflection point")
    if point_plane_defect(at, tangent_plane) > 1e-9:
        raise NotThroughPoint("reflection point is off the tangent plane")
    u1 = other_point(incoming, at)
    u2 = other_point(frame, at)
    h1 = dot4(tangent_plane, u1)
    h2 = dot4(tangent_plane, u2)
    scale = _norm4(tangent_plane)
    if abs(h2) <= 1e-12 * scale * _norm4(u2):
        raise DegenerateFrame("frame line lies in the tangent plane")
    # pencil coordinates on the basis (u1, u2) of the reference line:
    # incoming -> (1:0), frame -> (0:1), tangent trace -> (h2:-h1)
    if abs(h1) <= 1e-14 * scale * _norm4(u1):
        # incoming lies in the tangent plane: it is the fixed tangent line
        return incoming
    z = P1Value(1.0, 0.0)
    l = P1Value(0.0, 1.0)
    t = P1Value(h2, -h1)
    out = reflect_azimuth(z, l, t)
    if p1_equal(out, l):
        return frame
    x_out = tuple(out.u * u1[i] + out.v * u2[i] for i in range(4))
    return Line3(at, x_out)


def planarity_defect(vertices, lines) -> float:
    """Largest out-of-plane defect of the given lines against the plane of
    the three vertices; zero for genuine triangular orbits."""
    plane = plane_through(*vertices)
    return max(line_plane_defect(l, plane) for l in lines)


def orbit_planarity_check(orbit) -> float:
    """Planarity defect of a 3-periodic spatial orbit: the three chords
    and the three frame lines against the vertex plane."""
    vertices = [v["point"] for v in orbit]
    lines = []
    for i, v in enumerate(orbit):
        nxt = orbit[(i + 1) % 3]
        lines.append(Line3(v["point"], nxt["point"]))
        lines.append(v["frame"])
    return planarity_defect(vertices, lines)


def make_orbit_3d(vertices, tangent_planes):
    """Build the unique framed 3-periodic orbit with the given vertices
    and tangent planes.

    At each vertex the tangent line is the trace of the tangent plane in
    the orbit plane and the frame must be its harmonic conjugate w.r.t.
    the two chords; this determines the frame line, which automatically
    lies in the orbit plane.  Returns a list of vertex records.
    """
    plane = plane_through(*vertices)
    orbit = []
    for i, v in enumerate(vertices):
        prv = vertices[(i - 1) % 3]
        nxt = vertices[(i + 1) % 3]
        h = tangent_planes[i]
        if point_plane_defect(v, h) > 1e-9:
            raise NotThroughPoint("tangent plane misses its vertex")
        h1 = dot4(h, prv)
        h2 = dot4(h, nxt)
        scale = _norm4(h)
        if abs(h1) <= 1e-10 * scale * _norm4(prv) or (
            abs(h2) <= 1e-10 * scale * _norm4(nxt)
        ):
            raise DegenerateFrame("a chord lies in the tangent plane")
        # tangent trace in the pencil basis (prv, nxt) is (h2:-h1); the
        # harmonic conjugate w.r.t. the chords (1:0), (0:1) flips a sign.
        frame_pt = tuple(h2 * prv[j] + h1 * nxt[j] for j in range(4))
        orbit.append(
            {
                "point": v,
                "frame": Line3(v, frame_pt),
                "tangent_plane": h,
                "incoming": Line3(prv, v),
                "outgoing": Line3(v, nxt),
            }
        )
    for rec in orbit:
        if line_plane_defect(rec["frame"], plane) > 1e-9:
            raise DegenerateFrame("constructed frame left the orbit plane")
    return orbit
