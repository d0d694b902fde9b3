"""Azimuth asymptotics of degenerating secant families.

Coordinates are normalized so the tangent of the base curve at the base
point has azimuth 0 and the frame azimuth is finite and nonzero.  As the
secant azimuth z goes to 0, the reflected-at-the-base-point azimuth obeys
z' ~ -z, and the azimuth reflected at the moving point obeys
z* ~ (2I - 1) z, where I is the intersection index of the moving point's
curve with the base tangent line (I = 1 transverse, I >= 2 for tangency).
The tables fit the convergence order of |ratio - limit| against z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curves import FramedCurve, GraphCurve
from .errors import ChartDegenerate, LineNotThroughPoint
from .projective import (
    IDENTITY_CHART,
    PLine,
    PPoint,
    affine_point,
    incident,
    join,
    p1,
    reflect_azimuth,
)
from .scalars import all_exact, mag

DEFAULT_SECANT_AZIMUTHS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
_MAX_INDEX_ORDER = 8


def intersection_index(curve: FramedCurve, l: PLine, at: PPoint) -> int:
    """Order of vanishing of the line equation along the curve at `at`.

    1 means transverse crossing, 2 tangency, k higher-order contact; the
    leading nonzero derivative of the closed-form parametrization decides.
    """
    if not incident(at, l):
        raise LineNotThroughPoint("line does not pass through the point")
    t0 = curve.param_of_point(at)
    derivs = curve.point_derivs(t0, _MAX_INDEX_ORDER)
    lc = l.coeffs
    scale_l = max(float(mag(c)) for c in lc)
    values = [
        lc[0] * d[0] + lc[1] * d[1] + lc[2] * d[2] for d in derivs
    ]
    for k in range(1, len(values)):
        v = values[k]
        scale = scale_l * max(float(mag(c)) for c in derivs[k]) + scale_l
        if (v != 0) if all_exact((v,)) else (mag(v) > 1e-8 * scale):
            return k
    raise LineNotThroughPoint(
        f"no nonzero derivative up to order {_MAX_INDEX_ORDER}"
    )


@dataclass(frozen=True)
class AsymptoticsRow:
    z: float
    zprime_over_z: float
    zstar_over_z: float


@dataclass(frozen=True)
class AsymptoticsTable:
    case: str
    index: int
    rows: tuple
    zprime_limit: float
    zstar_limit: float
    slope_zprime: float
    slope_zstar: float

    def max_error(self):
        ep = max(abs(r.zprime_over_z - self.zprime_limit) for r in self.rows)
        es = max(abs(r.zstar_over_z - self.zstar_limit) for r in self.rows)
        return ep, es

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "index": self.index,
            "zprime_limit": self.zprime_limit,
            "zstar_limit": self.zstar_limit,
            "slope_zprime": self.slope_zprime,
            "slope_zstar": self.slope_zstar,
            "rows": [
                {"z": r.z, "zprime_over_z": r.zprime_over_z,
                 "zstar_over_z": r.zstar_over_z}
                for r in self.rows
            ],
        }


def fit_log_slope(xs, errs) -> float:
    """Least-squares slope of log(err) against log(x), ignoring exact
    zeros (already converged rows)."""
    pts = [(math.log(x), math.log(e)) for x, e in zip(xs, errs) if e > 0.0]
    if len(pts) < 2:
        return float("inf")
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    sxy = sum((p[0] - mx) * (p[1] - my) for p in pts)
    return sxy / sxx


def _base_parabola(frame_az: float) -> GraphCurve:
    """y = x^2/2 framed by a constant-azimuth field; tangent azimuth at the
    origin is 0 as the normalization requires."""
    if abs(frame_az) <= 1.5 or frame_az == float("inf"):
        raise ChartDegenerate("frame azimuth must avoid the tangent range")
    return GraphCurve(
        f_coeffs=(0.0, 0.0, 0.5),
        frame_az_coeffs=(float(frame_az),),
        curve_id="base-a",
        domain=(-1.5, 1.5),
    )


def _reflect_at_base(curve_a: GraphCurve, b_point: PPoint) -> float:
    """Azimuth of the chord from the origin to b reflected at the framed
    origin of curve a; drives the z' ~ -z comparison."""
    m_a = curve_a.eval(0.0)
    chord = join(m_a.point, b_point)
    z_in = IDENTITY_CHART.line_azimuth(chord)
    l = IDENTITY_CHART.line_azimuth(m_a.frame)
    t = IDENTITY_CHART.line_azimuth(m_a.tangent)
    out = reflect_azimuth(z_in, l, t)
    return float(out.u / out.v)


def leading_reflection_table(frame_az: float = 2.0,
                             zs=DEFAULT_SECANT_AZIMUTHS) -> AsymptoticsTable:
    """z' ~ -z alone, on a straight secant family through the base point;
    the moving point rides the transverse line x = 1 so z* ~ z as well."""
    curve_a = _base_parabola(frame_az)
    rows = []
    for z in zs:
        b = affine_point(1.0, z)          # az(A0 B) = z exactly
        zp = _reflect_at_base(curve_a, b)
        # the vertical line x = 1 is transverse; reflect the chord there
        # with the frame tangent to a at the origin (azimuth ~ z)
        zstar = _transverse_zstar(curve_a, 1.0, z)
        rows.append(AsymptoticsRow(z, zp / z, zstar / z))
    return _finish_table("leading", 1, rows, -1.0, 1.0, zs)


def _transverse_zstar(curve_a: GraphCurve, x0: float, z: float) -> float:
    """z* for a moving point on a transverse line through (x0, 0).

    The moving point's frame is the tangent line to the base parabola
    drawn from the moving point (the tangent-field configuration of the
    flat-orbit degeneration), so its azimuth is ~ z; the tangent azimuth
    of the carrier line stays away from 0 and infinity.
    """
    t0 = 1.0                              # azimuth of the carrier line b
    delta = z * x0 / (t0 - z)             # B = (x0 + delta, t0*delta)
    bx, by = x0 + delta, t0 * delta
    b = affine_point(bx, by)
    disc = bx * bx - 2.0 * by
    if disc < 0.0:
        raise ChartDegenerate("no tangent line from the moving point")
    u = bx - math.sqrt(disc)              # tangency abscissa near the origin
    frame = join(b, affine_point(u, u * u / 2.0)) if abs(u - bx) > 1e-14 else (
        join(b, affine_point(u, 0.0))
    )
    carrier = join(affine_point(x0, 0.0), b)
    chord = join(curve_a.eval(0.0).point, b)
    out = reflect_azimuth(
        IDENTITY_CHART.line_azimuth(chord),
        IDENTITY_CHART.line_azimuth(frame),
        IDENTITY_CHART.line_azimuth(carrier),
    )
    return float(out.u / out.v)


def transverse_table(frame_az: float = 2.0, x0: float = 1.0,
                     zs=DEFAULT_SECANT_AZIMUTHS) -> AsymptoticsTable:
    """Transverse intersection (I = 1): z* ~ z."""
    curve_a = _base_parabola(frame_az)
    rows = []
    for z in zs:
        zp = None
        delta = z * x0 / (1.0 - z)
        b = affine_point(x0 + delta, delta)
        zp = _reflect_at_base(curve_a, b)
        zstar = _transverse_zstar(curve_a, x0, z)
        rows.append(AsymptoticsRow(z, zp / z, zstar / z))
    return _finish_table("transverse", 1, rows, -1.0, 1.0, zs)


def conic_self_table(frame_az: float = 2.0,
                     zs=DEFAULT_SECANT_AZIMUTHS) -> AsymptoticsTable:
    """Moving point on the base parabola itself (I = 2): z* ~ 3 z.

    The chord from the origin to the point at abscissa 2z has azimuth
    exactly z; the reflection at the moving framed point uses the curve's
    own tangent, whose azimuth is ~ 2z.
    """
    curve_a = _base_parabola(frame_az)
    rows = []
    for z in zs:
        xb = 2.0 * z
        m_b = curve_a.eval(xb)
        chord = join(curve_a.eval(0.0).point, m_b.point)
        zp = _reflect_at_base(curve_a, m_b.point)
        out = reflect_azimuth(
            IDENTITY_CHART.line_azimuth(chord),
            IDENTITY_CHART.line_azimuth(m_b.frame),
            IDENTITY_CHART.line_azimuth(m_b.tangent),
        )
        zstar = float(out.u / out.v)
        rows.append(AsymptoticsRow(z, zp / z, zstar / z))
    return _finish_table("conic-self", 2, rows, -1.0, 3.0, zs)


def _finish_table(case, index, rows, zp_limit, zs_limit, zs) -> AsymptoticsTable:
    slope_p = fit_log_slope(zs, [abs(r.zprime_over_z - zp_limit) for r in rows])
    slope_s = fit_log_slope(zs, [abs(r.zstar_over_z - zs_limit) for r in rows])
    return AsymptoticsTable(case, index, tuple(rows), zp_limit, zs_limit,
                            slope_p, slope_s)


def asymptotics_experiment(frame_az: float = 2.0,
                           zs=DEFAULT_SECANT_AZIMUTHS) -> dict:
    """All three degenerating-family cases as a name -> table mapping."""
    return {
        "leading": leading_reflection_table(frame_az, zs=zs),
        "transverse": transverse_table(frame_az, zs=zs),
        "conic-self": conic_self_table(frame_az, zs=zs),
    }
