"""Line-framed boundary curves and billiard tables.

A framed curve is a parametrized boundary piece together with a transverse
line field: at each boundary point it provides the exact closed-form
tangent line and the frame line used by the reflection law.  The catalog
covers lines with a pivot frame (all frame lines through one point),
conics with Euclidean-normal or pivot frames, and polynomial graph curves
with a polynomial frame-azimuth field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .dual import dcos, dsin, value
from .errors import (
    ChartDegenerate,
    CollinearVertices,
    DegenerateConic,
    DegenerateFrame,
    LeftDomain,
    PivotOnLine,
)
from .projective import (
    IDENTITY_CHART,
    AffineChart,
    PLine,
    PPoint,
    incident,
    join,
    line_point_basis,
    lines_equal,
    norm2,
    points_equal,
)
from .scalars import all_exact, clear_denominators, mag

_TRANSVERSALITY_SAMPLES = 33


def _cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _exact_div(num, den):
    """Division that stays exact for int/Fraction operands."""
    if all_exact((num, den)):
        return Fraction(num) / Fraction(den)
    return num / den


def poly_eval(coeffs, x):
    """Evaluate sum(coeffs[k] * x**k) by Horner's rule."""
    out = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        out = out * x + c
    return out


def poly_derivative(coeffs):
    if len(coeffs) <= 1:
        return (0 * coeffs[0],)
    return tuple(k * c for k, c in enumerate(coeffs) if k > 0)


@dataclass(frozen=True)
class FramedPoint:
    """Boundary point with its frame line and tangent line."""

    point: PPoint
    frame: PLine
    tangent: PLine
    curve_id: str
    param: object


class FramedCurve:
    """Base class: parametrized boundary with closed-form tangent/frame."""

    curve_id: str
    domain: tuple
    closed: bool = False

    # -- parametrization -------------------------------------------------

    def point_hom(self, t):
        """Homogeneous representative of the boundary point at t."""
        raise NotImplementedError

    def point_derivs(self, t, order: int):
        """[X, X', ..., X^(order)] of the homogeneous representative."""
        raise NotImplementedError

    def frame_hom(self, t):
        """Coefficients of the frame line at t."""
        raise NotImplementedError

    def tangent_hom(self, t):
        X, dX = self.point_derivs(t, 1)
        return _cross3(X, dX)

    # -- domain ----------------------------------------------------------

    def wrap_param(self, t):
        if not self.closed:
            return t
        lo, hi = self.domain
        width = hi - lo
        return (t - lo) % width + lo

    def in_domain(self, t) -> bool:
        if self.closed:
            return True
        lo, hi = self.domain
        tv = value(t)
        tv = tv.real if isinstance(tv, complex) else tv
        return lo <= tv <= hi

    def require_domain(self, t):
        if not self.in_domain(t):
            raise LeftDomain(
                f"parameter {value(t)!r} outside domain {self.domain} "
                f"of piece {self.curve_id!r}"
            )

    # -- evaluation ------------------------------------------------------

    def point_at(self, t) -> PPoint:
        return PPoint(self.point_hom(t))

    def tangent_at(self, t) -> PLine:
        return PLine(self.tangent_hom(t))

    def frame_at(self, t) -> PLine:
        return PLine(self.frame_hom(t))

    def eval(self, t) -> FramedPoint:
        """FramedPoint at t; errors outside the domain, never extrapolates."""
        self.require_domain(t)
        t = self.wrap_param(t)
        frame = self.frame_at(t)
        tangent = self.tangent_at(t)
        if lines_equal(frame, tangent):
            raise DegenerateFrame(
                f"frame equals tangent at t={value(t)!r} on {self.curve_id!r}"
            )
        return FramedPoint(self.point_at(t), frame, tangent, self.curve_id, t)

    # -- implicit form and intersections ----------------------------------

    def implicit_defect(self, p: PPoint, chart: AffineChart):
        """Signed, scale-invariant defect of a point against the boundary;
        zero exactly on the supporting curve."""
        raise NotImplementedError

    def line_intersections(self, l: PLine):
        """Parameters (sorted, within domain) where the line meets the
        boundary; closed form per curve kind."""
        raise NotImplementedError

    def param_of_point(self, p: PPoint):
        raise NotImplementedError

    def _validate_transversality(self):
        lo, hi = self.domain
        n = _TRANSVERSALITY_SAMPLES
        for i in range(n):
            t = lo + (hi - lo) * Fraction(i, n - 1)
            if not all_exact((lo, hi)):
                t = float(t)
            if lines_equal(self.frame_at(t), self.tangent_at(t)):
                raise DegenerateFrame(
                    f"frame field tangent to {self.curve_id!r} at t={t!r}"
                )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineWithPivot(FramedCurve):
    """Segment of a line, framed by the pencil through a pivot point.

    This is the building block of right-spherical billiards: the boundary
    is supported on a line and every frame line passes through the pivot.
    """

    a0: PPoint
    a1: PPoint
    pivot: PPoint
    curve_id: str
    domain: tuple
    chart: AffineChart = IDENTITY_CHART
    closed: bool = field(default=False, init=False)

    def __post_init__(self):
        a0c, a1c = self.a0.coords, self.a1.coords
        if all_exact(a0c) and all_exact(a1c):
            # one shared scaling keeps the affine parametrization intact
            flat = clear_denominators(a0c + a1c)
            object.__setattr__(self, "a0", PPoint(flat[:3]))
            object.__setattr__(self, "a1", PPoint(flat[3:]))
        if all_exact(self.pivot.coords):
            object.__setattr__(
                self, "pivot", PPoint(clear_denominators(self.pivot.coords))
            )
        support = join(self.a0, self.a1)
        if incident(self.pivot, support):
            raise PivotOnLine("pivot lies on the supporting line")
        object.__setattr__(self, "_support", support.coeffs)

    @property
    def support(self) -> PLine:
        return PLine(self._support)

    def point_hom(self, s):
        a0, a1 = self.a0.coords, self.a1.coords
        if isinstance(s, (int, Fraction)) and all_exact(a0) and all_exact(a1):
            # integer representative q*((1-s) a0 + s a1); keeps the exact
            # chain gcd-free
            f = Fraction(s)
            p, q = f.numerator, f.denominator
            return tuple((q - p) * a0[i] + p * a1[i] for i in range(3))
        return tuple((1 - s) * a0[i] + s * a1[i] for i in range(3))

    def point_derivs(self, s, order):
        a0, a1 = self.a0.coords, self.a1.coords
        out = [self.point_hom(s), tuple(a1[i] - a0[i] for i in range(3))]
        zero = tuple(0 * a0[i] for i in range(3))
        while len(out) <= order:
            out.append(zero)
        return out[: order + 1]

    def tangent_hom(self, s):
        return self._support

    def frame_hom(self, s):
        return _cross3(self.point_hom(s), self.pivot.coords)

    def implicit_defect(self, p: PPoint, chart: AffineChart):
        m = self._support
        d = _dot3(m, p.coords)
        scale = max(abs(c) for c in m) * max(abs(c) for c in p.coords)
        return _exact_div(d, scale)

    def line_intersections(self, l: PLine):
        d0 = _dot3(l.coeffs, self.a0.coords)
        d1 = _dot3(l.coeffs, self.a1.coords)
        den = d0 - d1
        scale = norm2(l.coeffs) * max(norm2(self.a0.coords), norm2(self.a1.coords))
        if (den == 0) if all_exact((d0, d1)) else (mag(den) <= 1e-13 * scale):
            return []
        s = _exact_div(d0, den)
        return [s] if self.in_domain(s) else []

    def param_of_point(self, p: PPoint):
        # Solve p ~ (1-s) a0 + s a1 on the best-conditioned coordinate pair.
        a0, a1, x = self.a0.coords, self.a1.coords, p.coords
        diff = tuple(a1[i] - a0[i] for i in range(3))
        i = max(range(3), key=lambda k: mag(diff[k]))
        j = max(
            (k for k in range(3) if k != i),
            key=lambda k: mag(x[k] * diff[i] - x[i] * diff[k]),
        )
        den = x[j] * diff[i] - x[i] * diff[j]
        num = x[i] * a0[j] - x[j] * a0[i]
        return _exact_div(num, den)


@dataclass(frozen=True)
class Ellipse(FramedCurve):
    """Axis-aligned ellipse arc, angle-parametrized (floating modes).

    frame_kind "normal" carries the Euclidean normal line field of the
    affine chart; "pivot" sends every frame line through a pivot point.
    """

    cx: float
    cy: float
    rx: float
    ry: float
    curve_id: str
    domain: tuple = (-math.pi, math.pi)
    frame_kind: str = "normal"
    pivot: PPoint | None = None
    closed: bool = True

    def __post_init__(self):
        if not (self.rx > 0 and self.ry > 0):
            raise DegenerateConic("semi-axes must be positive")
        if self.frame_kind == "pivot":
            if self.pivot is None:
                raise DegenerateConic("pivot frame needs a pivot point")
            self._validate_transversality()
        elif self.frame_kind != "normal":
            raise DegenerateConic(f"unknown frame kind {self.frame_kind!r}")

    def point_hom(self, t):
        return (1.0, self.cx + self.rx * dcos(t), self.cy + self.ry * dsin(t))

    def point_derivs(self, t, order):
        c, s = dcos(t), dsin(t)
        out = [(1.0, self.cx + self.rx * c, self.cy + self.ry * s)]
        cycle = [
            (0.0, -self.rx * s, self.ry * c),
            (0.0, -self.rx * c, -self.ry * s),
            (0.0, self.rx * s, -self.ry * c),
            (0.0, self.rx * c, self.ry * s),
        ]
        for k in range(order):
            out.append(cycle[k % 4])
        return out

    def frame_hom(self, t):
        X = self.point_hom(t)
        if self.frame_kind == "pivot":
            return _cross3(X, self.pivot.coords)
        c, s = dcos(t), dsin(t)
        normal_dir = (0.0, c / self.rx, s / self.ry)
        return _cross3(X, normal_dir)

    def implicit_defect(self, p: PPoint, chart: AffineChart):
        u, v = chart.to_affine(p)
        return ((u - self.cx) / self.rx) ** 2 + ((v - self.cy) / self.ry) ** 2 - 1

    def line_intersections(self, l: PLine):
        l0, l1, l2 = (float(value(c)) for c in l.coeffs)
        a = l1 * self.rx
        b = l2 * self.ry
        c = l0 + l1 * self.cx + l2 * self.cy
        r = math.hypot(a, b)
        if r <= 1e-15 * norm2(l.coeffs):
            return []
        ratio = -c / r
        if abs(ratio) > 1.0:
            if abs(ratio) > 1.0 + 1e-12:
                return []
            ratio = math.copysign(1.0, ratio)
        phi = math.atan2(b, a)
        delta = math.acos(ratio)
        sols = {self.wrap_param(phi + delta), self.wrap_param(phi - delta)}
        return sorted(t for t in sols if self.in_domain(t))

    def param_of_point(self, p: PPoint):
        u, v = IDENTITY_CHART.to_affine(PPoint(tuple(map(value, p.coords))))
        return math.atan2((v - self.cy) / self.ry, (u - self.cx) / self.rx)


@dataclass(frozen=True)
class GraphCurve(FramedCurve):
    """Graph y = f(x) with polynomial f and polynomial frame azimuth g.

    Used for perturbations of lines and for controlled tangency order in
    the azimuth-asymptotics experiments.
    """

    f_coeffs: tuple
    frame_az_coeffs: tuple
    curve_id: str
    domain: tuple
    closed: bool = field(default=False, init=False)

    def __post_init__(self):
        object.__setattr__(self, "_df", poly_derivative(self.f_coeffs))
        self._validate_transversality()

    def point_hom(self, x):
        one = 1 if all_exact((x,)) else 1.0
        return (one, x, poly_eval(self.f_coeffs, x))

    def point_derivs(self, x, order):
        out = [self.point_hom(x)]
        coeffs = self.f_coeffs
        zero = 0 * x
        one = 1 if all_exact((x,)) else 1.0
        for k in range(1, order + 1):
            coeffs = poly_derivative(coeffs)
            first = one if k == 1 else zero
            out.append((zero, first, poly_eval(coeffs, x)))
        return out

    def frame_hom(self, x):
        X = self.point_hom(x)
        az = poly_eval(self.frame_az_coeffs, x)
        one = 1 if all_exact((x,)) else 1.0
        return _cross3(X, (0 * x, one, az))

    def implicit_defect(self, p: PPoint, chart: AffineChart):
        u, v = chart.to_affine(p)
        return v - poly_eval(self.f_coeffs, u)

    def line_intersections(self, l: PLine):
        import numpy as np

        l0, l1, l2 = (complex(value(c)) for c in l.coeffs)
        # l0 + l1 x + l2 f(x) = 0 as a polynomial in x
        coeffs = [l2 * c for c in self.f_coeffs]
        while len(coeffs) < 2:
            coeffs.append(0.0)
        coeffs[0] += l0
        coeffs[1] += l1
        arr = np.array(list(reversed(coeffs)), dtype=complex)
        if np.max(np.abs(arr)) == 0:
            return []
        arr = np.trim_zeros(arr, "f")
        if arr.size < 2:
            return []
        roots = np.roots(arr)
        sols = sorted(
            float(r.real)
            for r in roots
            if abs(r.imag) <= 1e-9 * (1 + abs(r.real)) and self.in_domain(r.real)
        )
        return sols

    def param_of_point(self, p: PPoint):
        u, _ = IDENTITY_CHART.to_affine(p)
        return u


# ---------------------------------------------------------------------------
# constructors


def _finite_rep(p: PPoint, chart: AffineChart) -> PPoint:
    u, v = chart.to_affine(p)
    return chart.from_affine(u, v)


def omega(l: PLine, pivot: PPoint, curve_id: str = "omega",
          domain=(Fraction(0), Fraction(1)), chart: AffineChart = IDENTITY_CHART,
          ) -> LineWithPivot:
    """Line-framed curve on the line l with all frames through the pivot."""
    if incident(pivot, l):
        raise PivotOnLine("pivot lies on the supporting line")
    b0, b1 = line_point_basis(l)
    candidates = [b0, b1, PPoint(tuple(b0.coords[i] + b1.coords[i] for i in range(3)))]
    finite = []
    for cand in candidates:
        try:
            finite.append(_finite_rep(cand, chart))
        except ChartDegenerate:
            continue
        if len(finite) == 2:
            break
    if len(finite) < 2:
        raise PivotOnLine("supporting line lies at infinity in the chart")
    return LineWithPivot(finite[0], finite[1], pivot, curve_id, domain, chart)


def omega_segment(a0: PPoint, a1: PPoint, pivot: PPoint, curve_id: str,
                  domain, chart: AffineChart = IDENTITY_CHART) -> LineWithPivot:
    """Pivot-framed line piece parametrized affinely from a0 to a1."""
    return LineWithPivot(
        _finite_rep(a0, chart), _finite_rep(a1, chart), pivot, curve_id,
        domain, chart,
    )


def euclidean_normal_frame(cx, cy, rx, ry, curve_id: str = "conic",
                           domain=(-math.pi, math.pi)) -> Ellipse:
    """Nondegenerate conic equipped with the Euclidean normal line field."""
    return Ellipse(float(cx), float(cy), float(rx), float(ry), curve_id, domain)


@dataclass(frozen=True)
class Billiard:
    """Ordered collection of framed boundary pieces plus the affine chart
    in which residuals and azimuths are measured."""

    pieces: tuple
    chart: AffineChart = IDENTITY_CHART
    dimension: int = 2

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        for i, p in enumerate(self.pieces):
            for q in self.pieces[i + 1:]:
                if self._same_point_set(p, q, self.chart):
                    raise DegenerateConic(
                        f"pieces {p.curve_id!r} and {q.curve_id!r} coincide"
                    )

    @staticmethod
    def _same_point_set(p: FramedCurve, q: FramedCurve, chart: AffineChart,
                        samples: int = 5) -> bool:
        lo, hi = p.domain
        for i in range(samples):
            t = lo + (hi - lo) * Fraction(i, samples - 1)
            if not all_exact((lo, hi)):
                t = float(t)
            x = p.point_at(t)
            d = q.implicit_defect(x, chart)
            if (d != 0) if all_exact((d,)) else (abs(d) > 1e-9):
                return False
        return True


def right_spherical(P: PPoint, Q: PPoint, R: PPoint,
                    chart: AffineChart = IDENTITY_CHART,
                    domain=(Fraction(1, 20), Fraction(19, 20)),
                    pivot_shift=None) -> Billiard:
    """The right-spherical billiard of three non-collinear points.

    Piece 0 is supported on PQ with pivot R, piece 1 on PR with pivot Q,
    piece 2 on QR with pivot P, each parametrized affinely between its two
    vertices.  Pieces 0 and 1 use the given parameter interval; piece 2
    gets a widened interval covering the closure image of the (s, t)
    square, so every triangular orbit seeded in the first two domains
    lands inside the third.  `pivot_shift=(piece_index, (du, dv))` moves
    one pivot in chart coordinates; used by the falsification experiments.
    """
    det = _dot3(P.coords, _cross3(Q.coords, R.coords))
    scale = norm2(P.coords) * norm2(Q.coords) * norm2(R.coords)
    if (det == 0) if all_exact((det,)) else (mag(det) <= 1e-12 * scale):
        raise CollinearVertices("right-spherical billiard needs a triangle")
    lo, hi = domain
    margin = lo * (1 - hi) / (hi + lo - 2 * hi * lo)
    wide = (margin / 2, 1 - margin / 2)
    sides = [
        (P, Q, R, "alpha", domain),
        (P, R, Q, "beta", domain),
        (Q, R, P, "gamma", wide),
    ]
    pieces = []
    for idx, (u0, u1, piv, name, dom) in enumerate(sides):
        if pivot_shift is not None and pivot_shift[0] == idx:
            du, dv = pivot_shift[1]
            pu, pv = chart.to_affine(piv)
            piv = chart.from_affine(pu + du, pv + dv)
        pieces.append(omega_segment(u0, u1, piv, name, dom, chart))
    return Billiard(tuple(pieces), chart)
