"""Planar projective primitives over an abstract scalar field.

Points and lines live in homogeneous coordinates [x0:x1:x2]; the affine
chart (u, v) = (x1/x0, x2/x0) is the default.  Values on a projective
line are homogeneous pairs (u:v) and all cross-ratio / harmonic-conjugacy
arithmetic is done with 2x2 determinant formulas on those pairs, never by
dividing to affine values first, so that infinity is a first-class value.

The reflection involution z -> ((l+t)z - 2lt) / (2z - (l+t)) with fixed
points l, t is the unique nontrivial conformal involution of the pencil
fixing the frame and tangent azimuths; it implements the projective
billiard reflection law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AuxThroughCenter,
    ChartDegenerate,
    DegeneratePair,
    DegeneratePencil,
    DegenerateFrame,
    LineIsReference,
    NotConcurrent,
    NotThroughPoint,
)
from .scalars import INCIDENCE_RTOL, all_exact, mag, normalize_homogeneous

# ---------------------------------------------------------------------------
# points of the projective line


@dataclass(frozen=True)
class P1Value:
    """Point of P^1 as a homogeneous pair; affine value u/v, infinity (1:0)."""

    u: object
    v: object

    def is_infinite(self, rtol: float = INCIDENCE_RTOL) -> bool:
        if all_exact((self.u, self.v)):
            return self.v == 0
        return mag(self.v) <= rtol * max(mag(self.u), mag(self.v))

    def affine(self):
        """Affine value u/v; raises ZeroDivisionError at infinity."""
        return self.u / self.v

    def __repr__(self):
        return f"P1({self.u!r}:{self.v!r})"


P1_INFINITY = P1Value(1, 0)


def p1(value) -> P1Value:
    """Lift an affine scalar (or an existing P1Value) to P^1."""
    if isinstance(value, P1Value):
        return value
    return P1Value(value, 1 if isinstance(value, (int, Fraction)) else 1.0)


def p1_cross(a: P1Value, b: P1Value):
    return a.u * b.v - b.u * a.v


def p1_norm(a: P1Value) -> float:
    return max(float(mag(a.u)), float(mag(a.v)))


def p1_equal(a: P1Value, b: P1Value, rtol: float = INCIDENCE_RTOL) -> bool:
    d = p1_cross(a, b)
    if all_exact((a.u, a.v, b.u, b.v)):
        return d == 0
    return mag(d) <= rtol * p1_norm(a) * p1_norm(b)


def p1_defect(a: P1Value, b: P1Value):
    """Scale-invariant separation |u1 v2 - u2 v1| / (max-norms).

    Exactly zero iff a == b in P^1; stays exact (Fraction) for exact
    inputs so rational-mode residuals are exact.
    """
    d = abs(p1_cross(a, b))
    na = max(abs(a.u), abs(a.v))
    nb = max(abs(b.u), abs(b.v))
    if all_exact((d, na, nb)):
        return Fraction(d) / (Fraction(na) * Fraction(nb))
    return d / (na * nb)


def cross_ratio_points(x1: P1Value, x2: P1Value, x3: P1Value, x4: P1Value) -> P1Value:
    """Cross-ratio (x1, x2; x3, x4) = h(x1) for the unique projective map h
    with h(x2) = 1, h(x3) = 0, h(x4) = infinity."""
    for a, b in ((x2, x3), (x2, x4), (x3, x4)):
        if p1_equal(a, b):
            raise DegeneratePencil("reference triple must be pairwise distinct")
    return P1Value(
        p1_cross(x1, x3) * p1_cross(x2, x4),
        p1_cross(x1, x4) * p1_cross(x2, x3),
    )


def harmonic_conjugate(z1: P1Value, z2: P1Value, z3: P1Value) -> P1Value:
    """The z4 with cross-ratio (z1, z2; z3, z4) = -1, evaluated projectively."""
    if p1_equal(z1, z2):
        raise DegeneratePair("harmonic conjugation needs z1 != z2")
    s = z1.u * z2.v + z2.u * z1.v
    return P1Value(
        s * z3.u - 2 * z1.u * z2.u * z3.v,
        2 * z3.u * z1.v * z2.v - s * z3.v,
    )


def reflect_azimuth(z: P1Value, l: P1Value, t: P1Value) -> P1Value:
    """Reflection involution with fixed points l and t.

    For l == t the involution degenerates to the constant map onto l,
    which is the defined behavior of the reflection law in that case.
    """
    if p1_equal(l, t):
        return l
    return harmonic_conjugate(l, t, z)


def mobius_apply(m, x: P1Value) -> P1Value:
    """Apply a 2x2 matrix ((a, b), (c, d)) to a homogeneous pair."""
    (a, b), (c, d) = m
    return P1Value(a * x.u + b * x.v, c * x.u + d * x.v)


# ---------------------------------------------------------------------------
# points and lines of the projective plane


@dataclass(frozen=True)
class PPoint:
    """Projective point with homogeneous coords (x0, x1, x2), not all zero."""

    coords: tuple

    def normalized(self) -> "PPoint":
        return PPoint(normalize_homogeneous(self.coords))

    def __repr__(self):
        return f"PPoint{self.coords!r}"


@dataclass(frozen=True)
class PLine:
    """Projective line with homogeneous coefficients (covector)."""

    coeffs: tuple

    def normalized(self) -> "PLine":
        return PLine(normalize_homogeneous(self.coeffs))

    def __repr__(self):
        return f"PLine{self.coeffs!r}"


def point(x0, x1, x2) -> PPoint:
    return PPoint((x0, x1, x2))


def affine_point(u, v) -> PPoint:
    one = 1 if all_exact((u, v)) else 1.0
    return PPoint((one, u, v))


def line(c0, c1, c2) -> PLine:
    return PLine((c0, c1, c2))


def _cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def norm2(vec) -> float:
    return math.sqrt(sum(float(mag(c)) ** 2 for c in vec))


def _is_zero_vec(vec, scale_a, scale_b, rtol) -> bool:
    if all_exact(vec):
        return all(c == 0 for c in vec)
    return max(float(mag(c)) for c in vec) <= rtol * scale_a * scale_b


def join(p: PPoint, q: PPoint) -> PLine:
    """Line through two distinct points; antisymmetric in (p, q)."""
    c = _cross3(p.coords, q.coords)
    if _is_zero_vec(c, norm2(p.coords), norm2(q.coords), INCIDENCE_RTOL):
        raise DegeneratePair("join of coincident points")
    return PLine(c)


def meet(l: PLine, m: PLine) -> PPoint:
    """Intersection point of two distinct lines; antisymmetric in (l, m)."""
    c = _cross3(l.coeffs, m.coeffs)
    if _is_zero_vec(c, norm2(l.coeffs), norm2(m.coeffs), INCIDENCE_RTOL):
        raise DegeneratePair("meet of coincident lines")
    return PPoint(c)


def incident(p: PPoint, l: PLine, rtol: float = INCIDENCE_RTOL) -> bool:
    """<p, l> = 0, exactly over rationals, |.| <= rtol*|p||l| over floats."""
    d = _dot3(p.coords, l.coeffs)
    if all_exact(p.coords) and all_exact(l.coeffs):
        return d == 0
    return mag(d) <= rtol * norm2(p.coords) * norm2(l.coeffs)


def points_equal(p: PPoint, q: PPoint, rtol: float = INCIDENCE_RTOL) -> bool:
    c = _cross3(p.coords, q.coords)
    return _is_zero_vec(c, norm2(p.coords), norm2(q.coords), rtol)


def lines_equal(l: PLine, m: PLine, rtol: float = INCIDENCE_RTOL) -> bool:
    c = _cross3(l.coeffs, m.coeffs)
    return _is_zero_vec(c, norm2(l.coeffs), norm2(m.coeffs), rtol)


# ---------------------------------------------------------------------------
# affine charts and azimuths


def _intify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _adjugate3(m):
    return tuple(
        tuple(
            m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
            - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3]
            for j in range(3)
        )
        for i in range(3)
    )


def _mat_vec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(3)) for i in range(3))


def _vec_mat(v, m):
    return tuple(sum(v[i] * m[i][j] for i in range(3)) for j in range(3))


@dataclass(frozen=True)
class AffineChart:
    """Affine chart y = H x with coordinates (y1/y0, y2/y0).

    The chart's infinity line is {<h0, x> = 0}; azimuths of lines are taken
    on it.  H must be invertible; for exact modes supply exact entries.
    """

    matrix: tuple
    inverse: tuple
    identity: bool = False

    @staticmethod
    def from_matrix(matrix) -> "AffineChart":
        m = tuple(tuple(row) for row in matrix)
        adj = _adjugate3(m)
        det = sum(m[0][j] * adj[j][0] for j in range(3))
        if det == 0 or (not all_exact([det]) and mag(det) < 1e-14):
            raise ChartDegenerate("chart matrix is singular")
        if all_exact([det]) and all(all_exact(row) for row in adj):
            det = Fraction(det)
            inv = tuple(
                tuple(_intify(Fraction(e) / det) for e in row) for row in adj
            )
        else:
            inv = tuple(tuple(e / det for e in row) for row in adj)
        ident = all(
            m[i][j] == (1 if i == j else 0) for i in range(3) for j in range(3)
        )
        return AffineChart(m, inv, ident)

    @property
    def infinity_line(self) -> PLine:
        return PLine(self.matrix[0])

    def to_affine(self, p: PPoint):
        y = p.coords if self.identity else _mat_vec(self.matrix, p.coords)
        if all_exact(y):
            if y[0] == 0:
                raise ChartDegenerate("point at infinity in this chart")
            return Fraction(y[1]) / Fraction(y[0]), Fraction(y[2]) / Fraction(y[0])
        scale = max(float(mag(c)) for c in y)
        if mag(y[0]) <= 1e-13 * scale:
            raise ChartDegenerate("point at infinity in this chart")
        return y[1] / y[0], y[2] / y[0]

    def from_affine(self, u, v) -> PPoint:
        one = 1 if all_exact((u, v)) else 1.0
        if self.identity:
            return PPoint((one, u, v))
        return PPoint(_mat_vec(self.inverse, (one, u, v)))

    def line_azimuth(self, l: PLine) -> P1Value:
        """Azimuth of a line: its intersection with the chart's infinity
        line in slope coordinates (vertical lines give infinity)."""
        m = l.coeffs if self.identity else _vec_mat(l.coeffs, self.inverse)
        if _is_zero_vec((m[1], m[2], 0 * m[0]), norm2(m), 1.0, INCIDENCE_RTOL):
            raise LineIsReference("azimuth of the infinity line is undefined")
        return P1Value(-m[1], m[2])

    def line_through(self, p: PPoint, az: P1Value) -> PLine:
        """Line through p with the given azimuth."""
        hom = (0 * az.u, az.v, az.u)
        direction = PPoint(hom if self.identity else _mat_vec(self.inverse, hom))
        return join(p, direction)


IDENTITY_CHART = AffineChart.from_matrix(
    ((1, 0, 0), (0, 1, 0), (0, 0, 1))
)


def azimuth(l: PLine, chart: AffineChart = IDENTITY_CHART) -> P1Value:
    """Azimuth of a line in the given chart (default: slope w.r.t. x0=1)."""
    return chart.line_azimuth(l)


# ---------------------------------------------------------------------------
# pencils of lines through a point


def line_point_basis(l: PLine):
    """Two deterministic independent points spanning the line l."""
    c = l.coeffs
    k = max(range(3), key=lambda i: mag(c[i]))
    basis = []
    for i in range(3):
        if i == k:
            continue
        e = tuple(1 if j == i else 0 for j in range(3))
        basis.append(_cross3(c, e))
    return PPoint(basis[0]), PPoint(basis[1])


def point_on_line_p1(x: PPoint, l: PLine, basis=None) -> P1Value:
    """Coordinate of a point of l w.r.t. a two-point basis of l."""
    if basis is None:
        basis = line_point_basis(l)
    b0, b1 = basis[0].coords, basis[1].coords
    c = l.coeffs
    k = max(range(3), key=lambda i: mag(c[i]))
    i, j = [idx for idx in range(3) if idx != k]
    lam = x.coords[i] * b1[j] - x.coords[j] * b1[i]
    mu = b0[i] * x.coords[j] - b0[j] * x.coords[i]
    scale = norm2(x.coords) * max(norm2(b0), norm2(b1))
    if _is_zero_vec((lam, mu, 0 * lam), scale, 1.0, INCIDENCE_RTOL):
        raise NotThroughPoint("point has no coordinates on the carrier line")
    return P1Value(lam, mu)


@dataclass(frozen=True)
class PencilChart:
    """P^1 coordinates on the pencil of lines through a center point.

    A line of the pencil is coordinatized by its intersection with a
    reference line not through the center; the map is a bijection from the
    pencil onto the reference line.
    """

    center: PPoint
    reference: PLine

    def __post_init__(self):
        if incident(self.center, self.reference):
            raise AuxThroughCenter("reference line passes through the center")

    def basis(self):
        return line_point_basis(self.reference)

    def to_p1(self, l: PLine, basis=None) -> P1Value:
        if not incident(self.center, l):
            raise NotThroughPoint("line not in the pencil")
        x = meet(l, self.reference)
        return point_on_line_p1(x, self.reference, basis or self.basis())

    def from_p1(self, val: P1Value, basis=None) -> PLine:
        b0, b1 = basis or self.basis()
        x = PPoint(
            tuple(val.u * b0.coords[i] + val.v * b1.coords[i] for i in range(3))
        )
        return join(self.center, x)


_REFERENCE_CANDIDATES = (
    PLine((1, 0, 0)),
    PLine((0, 1, 0)),
    PLine((0, 0, 1)),
    PLine((1, 1, 1)),
)


def pencil_chart_at(center: PPoint) -> PencilChart:
    """Deterministic pencil chart at a point: the candidate reference line
    farthest from the center in the scale-invariant sense."""
    best, best_score = None, -1.0
    for cand in _REFERENCE_CANDIDATES:
        score = float(mag(_dot3(center.coords, cand.coeffs))) / (
            norm2(center.coords) * norm2(cand.coeffs)
        )
        if score > best_score:
            best, best_score = cand, score
    if best_score <= 0:
        raise DegeneratePencil("no reference line available")  # pragma: no cover
    return PencilChart(center, best)


def cross_ratio_lines(
    l1: PLine, l2: PLine, l3: PLine, l4: PLine, aux: PLine
) -> P1Value:
    """Cross-ratio of four concurrent lines via a fifth line.

    Equals the cross-ratio of the four intersection points with `aux`,
    coordinatized on `aux`; the value does not depend on the choice of aux.
    """
    ls = (l1, l2, l3, l4)
    center = None
    for a in range(4):
        for b in range(a + 1, 4):
            if not lines_equal(ls[a], ls[b]):
                center = meet(ls[a], ls[b])
                break
        if center is not None:
            break
    if center is None:
        raise DegeneratePencil("all four lines coincide")
    for l in ls:
        if not incident(center, l):
            raise NotConcurrent("lines do not share a common point")
    if incident(center, aux):
        raise AuxThroughCenter("auxiliary line passes through the pencil center")
    basis = line_point_basis(aux)
    vals = [point_on_line_p1(meet(l, aux), aux, basis) for l in (l1, l2, l3, l4)]
    return cross_ratio_points(*vals)


def reflect_line(at: PPoint, incoming: PLine, frame: PLine, tangent: PLine) -> PLine:
    """Projective reflection of a line in the pencil at `at`.

    Returns the outgoing line, harmonically conjugate to `incoming` with
    respect to (frame, tangent); frame and tangent are the fixed lines.
    """
    for l, what in ((incoming, "incoming"), (frame, "frame"), (tangent, "tangent")):
        if not incident(at, l):
            raise NotThroughPoint(f"{what} line does not pass through the point")
    if lines_equal(frame, tangent):
        raise DegenerateFrame("frame equals tangent; reflection degenerates")
    chart = pencil_chart_at(at)
    basis = chart.basis()
    z = chart.to_p1(incoming, basis)
    l = chart.to_p1(frame, basis)
    t = chart.to_p1(tangent, basis)
    out = reflect_azimuth(z, l, t)
    if p1_equal(out, z):
        return incoming
    return chart.from_p1(out, basis)
