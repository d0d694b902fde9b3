"""Projective billiard dynamics: orbit iteration, triangular-orbit closure,
grid scans and periodic-orbit search.

The closure residual implements the intersection construction for the
third vertex: reflect the chord AB at both endpoints and intersect the two
reflected lines.  The resulting point C extends (A, B) to a triangular
orbit iff C lies on the third piece and the reflection law holds there;
the residual is zero exactly in that case, and identically zero in both
parameters exactly for 3-reflective tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import Billiard, FramedCurve, FramedPoint, LineWithPivot
from .dual import Dual, value
from .errors import (
    DegenerateConfiguration,
    DegenerateFrame,
    FrameDegenerate,
    GeometryError,
    LeftDomain,
    NoConvergence,
    NoIntersectionInDomain,
    TangentIncidence,
)
from .projective import (
    PLine,
    PPoint,
    incident,
    join,
    lines_equal,
    meet,
    p1_cross,
    p1_defect,
    points_equal,
    reflect_azimuth,
    reflect_line,
)
from .scalars import all_exact, format_scalar

# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitVertex:
    framed: FramedPoint
    incoming: PLine
    outgoing: PLine


@dataclass(frozen=True)
class Orbit:
    """Sequence of reflections; for periodic orbits the chain is cyclic."""

    vertices: tuple
    periodic: bool

    def reversed(self) -> "Orbit":
        """Time-reversed orbit; valid because the reflection law is
        symmetric in (incoming, outgoing)."""
        flipped = [
            OrbitVertex(v.framed, v.outgoing, v.incoming)
            for v in reversed(self.vertices)
        ]
        return Orbit(tuple(flipped), self.periodic)

    def reflection_defects(self, chart):
        """Per-vertex azimuth defect of the reflection law."""
        out = []
        for v in self.vertices:
            z_in = chart.line_azimuth(v.incoming)
            z_out = chart.line_azimuth(v.outgoing)
            l = chart.line_azimuth(v.framed.frame)
            t = chart.line_azimuth(v.framed.tangent)
            out.append(float(p1_defect(reflect_azimuth(z_in, l, t), z_out)))
        return out

    def max_defect(self, chart) -> float:
        defects = self.reflection_defects(chart)
        pairs = list(zip(self.vertices[:-1], self.vertices[1:]))
        if self.periodic and len(self.vertices) > 1:
            pairs.append((self.vertices[-1], self.vertices[0]))
        for cur, nxt in pairs:
            defects.append(0.0 if lines_equal(cur.outgoing, nxt.incoming) else 1.0)
        return max(defects)


# ---------------------------------------------------------------------------
# single reflection step


def billiard_map(m1: FramedPoint, m2: FramedPoint, piece3: FramedCurve,
                 prev_param=None):
    """Reflect the chord m1.m2 at m2 and continue onto piece3.

    Returns (m2, m3).  When the reflected line meets piece3 twice, the
    intersection closer in parameter to `prev_param` wins, else the
    smaller parameter; the arrival point of the chord itself is excluded.
    """
    if points_equal(m1.point, m2.point):
        raise DegenerateConfiguration("consecutive vertices coincide")
    chord = join(m1.point, m2.point)
    if lines_equal(chord, m1.tangent) or lines_equal(chord, m2.tangent):
        raise TangentIncidence("chord tangent to the boundary at a vertex")
    try:
        out = reflect_line(m2.point, chord, m2.frame, m2.tangent)
    except DegenerateFrame as exc:
        raise FrameDegenerate(str(exc)) from exc
    params = [
        t for t in piece3.line_intersections(out)
        if not points_equal(piece3.point_at(t), m2.point)
    ]
    if not params:
        raise NoIntersectionInDomain(
            f"reflected line misses piece {piece3.curve_id!r}"
        )
    if prev_param is not None:
        params.sort(key=lambda t: (abs(float(value(t)) - float(value(prev_param))),
                                   float(value(t))))
    t3 = params[0]
    m3 = piece3.eval(t3)
    if lines_equal(out, m3.tangent):
        raise TangentIncidence("reflected line tangent to the target piece")
    return m2, m3


def iterate_orbit(bil: Billiard, params, steps: int, start_piece: int = 0) -> Orbit:
    """Chain `steps` reflections from two seed vertices on consecutive
    pieces (cyclically); returns the open orbit with per-vertex lines."""
    npieces = len(bil.pieces)
    s, t = params
    idx1 = start_piece % npieces
    idx2 = (start_piece + 1) % npieces
    m_prev = bil.pieces[idx1].eval(s)
    m_cur = bil.pieces[idx2].eval(t)
    chain = [m_prev, m_cur]
    piece_idx = [idx1, idx2]
    for j in range(steps):
        nxt = (piece_idx[-1] + 1) % npieces
        piece = bil.pieces[nxt]
        prev_param = chain[-2].param if piece_idx[-2] == nxt else None
        _, m3 = billiard_map(chain[-2], chain[-1], piece, prev_param)
        chain.append(m3)
        piece_idx.append(nxt)
    vertices = []
    for j in range(1, len(chain) - 1):
        incoming = join(chain[j - 1].point, chain[j].point)
        outgoing = join(chain[j].point, chain[j + 1].point)
        vertices.append(OrbitVertex(chain[j], incoming, outgoing))
    return Orbit(tuple(vertices), periodic=False)


# ---------------------------------------------------------------------------
# triangular closure


def _closure_chain(bil: Billiard, s, t):
    """Shared part of closure computations: the two reflected lines and
    their intersection point C (the candidate third vertex)."""
    pa, pb = bil.pieces[0], bil.pieces[1]
    m_a = pa.eval(s)
    m_b = pb.eval(t)
    A, B = m_a.point, m_b.point
    if points_equal(A, B):
        raise DegenerateConfiguration("A equals B")
    if incident(B, m_a.frame) or incident(B, m_a.tangent):
        raise DegenerateConfiguration("B lies on the frame or tangent at A")
    if incident(A, m_b.frame) or incident(A, m_b.tangent):
        raise DegenerateConfiguration("A lies on the frame or tangent at B")
    chord = join(A, B)
    refl_a = reflect_line(A, chord, m_a.frame, m_a.tangent)
    refl_b = reflect_line(B, chord, m_b.frame, m_b.tangent)
    if lines_equal(refl_a, refl_b):
        raise DegenerateConfiguration("reflected lines coincide")
    return m_a, m_b, refl_a, refl_b, meet(refl_a, refl_b)


def _third_vertex_param(piece: FramedCurve, refl_a: PLine, c: PPoint, chart):
    """Parameter of the intersection of the reflected-at-A line with the
    third piece, picking the intersection nearest to C."""
    params = piece.line_intersections(refl_a)
    if not params:
        raise NoIntersectionInDomain("reflected line misses the third piece")
    if len(params) == 1:
        return params[0]
    cu, cv = chart.to_affine(c)

    def dist2(tp):
        u, v = chart.to_affine(piece.point_at(tp))
        return float(abs(u - cu)) ** 2 + float(abs(v - cv)) ** 2

    return min(params, key=lambda tp: (dist2(tp), float(value(tp))))


def closure_residual(bil: Billiard, s, t):
    """Scalar closure defect of the 2-parameter configuration (s, t).

    Zero iff the intersection point C of the two reflected chords lies on
    piece 3 and the reflection law holds there; the value is the max of a
    scale-invariant incidence defect and the azimuth defect of the law,
    both measured in the billiard's fixed chart.  Exact over rationals.
    """
    m_a, m_b, refl_a, refl_b, c = _closure_chain(bil, s, t)
    piece3 = bil.pieces[2]
    inc_defect = abs(piece3.implicit_defect(c, bil.chart))
    t3 = _third_vertex_param(piece3, refl_a, c, bil.chart)
    m_c = piece3.eval(t3)
    z_in = bil.chart.line_azimuth(refl_a)
    z_out = bil.chart.line_azimuth(join(m_c.point, m_b.point))
    l_c = bil.chart.line_azimuth(m_c.frame)
    t_c = bil.chart.line_azimuth(m_c.tangent)
    az_defect = p1_defect(reflect_azimuth(z_in, l_c, t_c), z_out)
    return max(inc_defect, az_defect)


def closure_orbit(bil: Billiard, s, t) -> Orbit:
    """Triangular orbit through pieces (0, 1, 2) built by the closure
    construction; meaningful when the residual vanishes."""
    m_a, m_b, refl_a, refl_b, c = _closure_chain(bil, s, t)
    t3 = _third_vertex_param(bil.pieces[2], refl_a, c, bil.chart)
    m_c = bil.pieces[2].eval(t3)
    ab = join(m_a.point, m_b.point)
    ca = join(m_c.point, m_a.point)
    bc = join(m_b.point, m_c.point)
    vertices = (
        OrbitVertex(m_a, ca, ab),
        OrbitVertex(m_b, ab, bc),
        OrbitVertex(m_c, bc, ca),
    )
    return Orbit(vertices, periodic=True)


# ---------------------------------------------------------------------------
# grid scans


@dataclass(frozen=True)
class ScanReport:
    rows: tuple            # (s, t, residual, flag) in row-major order
    grid: int
    tol: float
    min_residual: float
    max_residual: float
    mean_residual: float
    fraction_below_tol: float
    degenerate_cells: int

    def to_csv(self) -> str:
        lines = ["s,t,residual,flag"]
        for s, t, r, flag in self.rows:
            lines.append(
                f"{format_scalar(s)},{format_scalar(t)},"
                f"{format_scalar(r)},{flag}"
            )
        return "\n".join(lines) + "\n"

    def stats(self) -> dict:
        return {
            "grid": self.grid,
            "tol": self.tol,
            "min_residual": self.min_residual,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "fraction_below_tol": self.fraction_below_tol,
            "degenerate_cells": self.degenerate_cells,
        }


def scan(bil: Billiard, grid: int, tol, ranges=None) -> ScanReport:
    """Evaluate the closure residual on a grid of cell centers.

    Degenerate cells are flagged, excluded from the statistics and
    counted; output row order is row-major in (s, t), deterministic for a
    fixed configuration.
    """
    if ranges is None:
        ranges = (bil.pieces[0].domain, bil.pieces[1].domain)
    (s_lo, s_hi), (t_lo, t_hi) = ranges
    exact = all_exact((s_lo, s_hi, t_lo, t_hi))
    rows = []
    residuals = []
    degenerate = 0
    below = 0
    for i in range(grid):
        fi = Fraction(2 * i + 1, 2 * grid)
        s = s_lo + (s_hi - s_lo) * (fi if exact else float(fi))
        for j in range(grid):
            fj = Fraction(2 * j + 1, 2 * grid)
            t = t_lo + (t_hi - t_lo) * (fj if exact else float(fj))
            try:
                r = closure_residual(bil, s, t)
            except GeometryError:
                degenerate += 1
                rows.append((s, t, float("nan"), 1))
                continue
            rows.append((s, t, r, 0))
            rf = float(r)
            residuals.append(rf)
            if (r <= tol) if all_exact((r, tol)) else (rf <= float(tol)):
                below += 1
    if residuals:
        stats = (min(residuals), max(residuals),
                 sum(residuals) / len(residuals), below / len(residuals))
    else:
        stats = (float("nan"),) * 4
    return ScanReport(tuple(rows), grid, float(tol), *stats, degenerate)


# ---------------------------------------------------------------------------
# periodic-orbit search


def _chain_residual_vector(bil: Billiard, params):
    """Azimuth-defect vector of the cyclic k-vertex reflection chain;
    smooth in the parameters, zero exactly on k-periodic orbits."""
    npieces = len(bil.pieces)
    k = len(params)
    framed = [bil.pieces[j % npieces].eval(params[j]) for j in range(k)]
    chart = bil.chart
    res = []
    for j in range(k):
        prv = framed[(j - 1) % k]
        cur = framed[j]
        nxt = framed[(j + 1) % k]
        z_in = chart.line_azimuth(join(prv.point, cur.point))
        z_out = chart.line_azimuth(join(cur.point, nxt.point))
        l = chart.line_azimuth(cur.frame)
        t = chart.line_azimuth(cur.tangent)
        refl = reflect_azimuth(z_in, l, t)
        norm = max(abs(refl.u), abs(refl.v)) * max(abs(z_out.u), abs(z_out.v))
        res.append(p1_cross(refl, z_out) / norm)
    return res


def _closure_residual_vector(bil: Billiard, params):
    """Two smooth closure components in (s, t) for triangular search."""
    s, t = params
    m_a, m_b, refl_a, refl_b, c = _closure_chain(bil, s, t)
    piece3 = bil.pieces[2]
    inc = piece3.implicit_defect(c, bil.chart)
    t3 = _third_vertex_param(piece3, refl_a, c, bil.chart)
    m_c = piece3.eval(t3)
    chart = bil.chart
    z_in = chart.line_azimuth(refl_a)
    z_out = chart.line_azimuth(join(m_c.point, m_b.point))
    refl = reflect_azimuth(z_in, chart.line_azimuth(m_c.frame),
                           chart.line_azimuth(m_c.tangent))
    norm = max(abs(refl.u), abs(refl.v)) * max(abs(z_out.u), abs(z_out.v))
    return [inc, p1_cross(refl, z_out) / norm]


def _orbit_from_solution(bil: Billiard, params, use_closure: bool) -> Orbit:
    if use_closure:
        return closure_orbit(bil, params[0], params[1])
    npieces = len(bil.pieces)
    k = len(params)
    framed = [bil.pieces[j % npieces].eval(params[j]) for j in range(k)]
    vertices = []
    for j in range(k):
        incoming = join(framed[(j - 1) % k].point, framed[j].point)
        outgoing = join(framed[j].point, framed[(j + 1) % k].point)
        vertices.append(OrbitVertex(framed[j], incoming, outgoing))
    return Orbit(tuple(vertices), periodic=True)


def find_periodic(bil: Billiard, k: int, seed_params, tol=1e-12,
                  max_iter: int = 60) -> Orbit:
    """Damped Gauss-Newton search for a k-periodic orbit.

    For triangular orbits on three line-supported pieces the unknowns are
    the two seed parameters and the residual is the closure system (so
    3-reflective tables converge immediately); otherwise all k vertex
    parameters are unknowns of the cyclic chain system.  Jacobians come
    from forward-mode duals, never finite differences; steps are halved
    until the residual decreases, up to 30 halvings, and failure to
    converge is reported, never clipped.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    use_closure = (
        k == 3
        and len(bil.pieces) == 3
        and all(isinstance(p, LineWithPivot) for p in bil.pieces)
    )
    if use_closure:
        if len(seed_params) != 2:
            raise ValueError("triangular search needs two seed parameters")
        params = list(seed_params)
        system = _closure_residual_vector
    else:
        params = list(seed_params)
        if len(params) == 2 and k > 2:
            params = _extend_seed(bil, params, k)
        if len(params) != k:
            raise ValueError(f"need {k} seed parameters, got {len(params)}")
        system = _chain_residual_vector

    def orbit_defect(ps):
        orb = _orbit_from_solution(bil, ps, use_closure)
        return orb.max_defect(bil.chart), orb

    exact_seed = all_exact(tuple(params))
    try:
        defect, orbit = orbit_defect(params)
    except GeometryError:
        defect, orbit = float("inf"), None
    if orbit is not None and (
        (defect == 0) if exact_seed else (defect <= float(tol))
    ):
        return orbit

    params = [float(value(p)) for p in params]
    best = float("inf")
    for _ in range(max_iter):
        fvec = np.array(
            [float(value(c)) for c in system(bil, params)], dtype=float
        )
        fnorm = float(np.linalg.norm(fvec))
        cols = []
        for i in range(len(params)):
            seeded = [
                Dual(p, 1.0) if i == j else p for j, p in enumerate(params)
            ]
            cols.append([_deriv_of(c) for c in system(bil, seeded)])
        jac = np.array(cols, dtype=float).T
        step, *_ = np.linalg.lstsq(jac, -fvec, rcond=None)
        scale = 1.0
        moved = None
        for _halving in range(31):
            cand = [p + scale * d for p, d in zip(params, step)]
            try:
                _require_in_domain(bil, cand, len(params), use_closure)
                cnorm = float(np.linalg.norm(
                    np.array([float(value(c)) for c in system(bil, cand)])
                ))
            except GeometryError:
                scale *= 0.5
                continue
            if cnorm < fnorm:
                moved = cand
                break
            scale *= 0.5
        if moved is None:
            break
        params = moved
        try:
            defect, orbit = orbit_defect(params)
        except GeometryError:
            continue
        best = min(best, defect)
        if defect <= float(tol):
            return orbit
    raise NoConvergence(best, max_iter)


def _deriv_of(x):
    d = x.b if isinstance(x, Dual) else 0.0
    return float(value(d)) if isinstance(d, Dual) else float(d)


def _require_in_domain(bil: Billiard, params, k: int, use_closure: bool):
    npieces = len(bil.pieces)
    if use_closure:
        pieces = [bil.pieces[0], bil.pieces[1]]
    else:
        pieces = [bil.pieces[j % npieces] for j in range(k)]
    for piece, p in zip(pieces, params):
        if not piece.in_domain(p):
            raise LeftDomain(
                f"parameter {p!r} left domain of {piece.curve_id!r}"
            )


def _extend_seed(bil: Billiard, seed, k: int):
    """Grow a 2-parameter seed to k parameters by chaining reflections."""
    params = [seed[0], seed[1]]
    npieces = len(bil.pieces)
    chain = [bil.pieces[0].eval(seed[0]), bil.pieces[1].eval(seed[1])]
    piece_idx = [0, 1 % npieces]
    for _ in range(k - 2):
        nxt = (piece_idx[-1] + 1) % npieces
        prev_param = chain[-2].param if piece_idx[-2] == nxt else None
        _, m3 = billiard_map(chain[-2], chain[-1], bil.pieces[nxt], prev_param)
        chain.append(m3)
        piece_idx.append(nxt)
        params.append(m3.param)
    return params
