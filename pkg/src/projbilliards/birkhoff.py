"""Extended phase space of triangular configurations and the rank of the
Birkhoff distribution restricted to it.

A phase point bundles a framed point on the base curve with two free
framed-point triples (B, L_B, T_B) and (C, L_C, T_C) subject to the three
reflection constraints.  The distribution D assigns to each point the
subspace of chart velocities whose B-velocity lies along T_B and whose
C-velocity lies along T_C; the two-parameter families of triangular
orbits of 3-reflective tables are integral surfaces, and the restricted
rank there is exactly 2.

Rank decisions use relative singular-value thresholds and demand an
explicit spectral gap; an ambiguous spectrum raises instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Billiard, FramedCurve, FramedPoint
from .dual import Dual, deriv, value
from .dynamics import _closure_chain, _third_vertex_param
from .errors import (
    ChartDegenerate,
    CollinearVertices,
    DegenerateFrame,
    RankDrop,
    RankUnstable,
)
from .projective import (
    AffineChart,
    IDENTITY_CHART,
    P1Value,
    PLine,
    PPoint,
    cross_ratio_points,
    incident,
    join,
    lines_equal,
    points_equal,
)

DEFAULT_SV_TOL = 1e-8
CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    """Configuration [(A, L_A, T_A), (B, L_B, T_B), (C, L_C, T_C)] with the
    A-triple carried by the base curve."""

    m_a: FramedPoint
    b: PPoint
    l_b: PLine
    t_b: PLine
    c: PPoint
    l_c: PLine
    t_c: PLine

    def __post_init__(self):
        if lines_equal(self.l_b, self.t_b) or lines_equal(self.l_c, self.t_c):
            raise DegenerateFrame("free frame equals its tangent")
        a = self.m_a.point
        if points_equal(a, self.b) or points_equal(a, self.c) or (
            points_equal(self.b, self.c)
        ):
            raise CollinearVertices("phase point needs three distinct vertices")
        if incident(self.c, join(a, self.b)):
            raise CollinearVertices("vertices of a phase point are collinear")


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis columns of a subspace of the chart tangent space."""

    ambient_dim: int
    vectors: np.ndarray          # shape (ambient, dim)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


class PhaseChart:
    """Local coordinates (s; B; az L_B, az T_B; C; az L_C, az T_C) on
    the product of the base curve with two framed-point triples.

    `frame` rotates the affine chart used for the eight free coordinates;
    retry with a rotated chart when a configuration is degenerate in the
    default one.
    """

    DIM = 9

    def __init__(self, alpha: FramedCurve, chart: AffineChart = IDENTITY_CHART):
        self.alpha = alpha
        self.chart = chart

    # -- coordinates -----------------------------------------------------

    def az_affine(self, l: PLine):
        az = self.chart.line_azimuth(l)
        if az.is_infinite():
            raise ChartDegenerate("azimuth at infinity in this chart")
        return az.u / az.v

    def coords(self, z: PhasePoint) -> list:
        bu, bv = self.chart.to_affine(z.b)
        cu, cv = self.chart.to_affine(z.c)
        return [
            z.m_a.param,
            bu, bv, self.az_affine(z.l_b), self.az_affine(z.t_b),
            cu, cv, self.az_affine(z.l_c), self.az_affine(z.t_c),
        ]

    def phase_point(self, coords) -> PhasePoint:
        s, bu, bv, lb, tb, cu, cv, lc, tc = coords
        b = self.chart.from_affine(bu, bv)
        c = self.chart.from_affine(cu, cv)
        one = 1.0
        return PhasePoint(
            self.alpha.eval(s),
            b,
            self.chart.line_through(b, P1Value(lb, one)),
            self.chart.line_through(b, P1Value(tb, one)),
            c,
            self.chart.line_through(c, P1Value(lc, one)),
            self.chart.line_through(c, P1Value(tc, one)),
        )

    # -- constraints -----------------------------------------------------

    def constraints(self, coords):
        """The three reflection-law defects (cross-ratio + 1), smooth in
        the chart coordinates; zero exactly on the constraint set."""
        s, bu, bv, lb, tb, cu, cv, lc, tc = coords
        m_a = self.alpha.eval(s)
        au, av = self.chart.to_affine(m_a.point)
        one = 1 if isinstance(bu, (int, float, complex)) else 1.0

        def az_pair(du, dv):
            return P1Value(dv, du)

        az_ab = az_pair(bu - au, bv - av)
        az_ac = az_pair(cu - au, cv - av)
        az_ba = az_pair(au - bu, av - bv)
        az_bc = az_pair(cu - bu, cv - bv)
        az_ca = az_pair(au - cu, av - cv)
        az_cb = az_pair(bu - cu, bv - cv)
        az_la = self.chart.line_azimuth(m_a.frame)
        az_ta = self.chart.line_azimuth(m_a.tangent)

        def defect(l, t, z1, z2):
            cr = cross_ratio_points(l, t, z1, z2)
            return cr.u / cr.v + 1

        return [
            defect(az_la, az_ta, az_ab, az_ac),
            defect(P1Value(lb, one), P1Value(tb, one), az_ba, az_bc),
            defect(P1Value(lc, one), P1Value(tc, one), az_ca, az_cb),
        ]

    def constraint_jacobian(self, coords) -> np.ndarray:
        base = [value(c) for c in coords]
        cols = []
        for i in range(self.DIM):
            seeded = [
                Dual(x, 1.0 if i == j else 0.0) for j, x in enumerate(base)
            ]
            cols.append([deriv(g) for g in self.constraints(seeded)])
        return np.array(cols).T


# ---------------------------------------------------------------------------
# linear algebra on subspaces


def _realify(m: np.ndarray) -> np.ndarray:
    """Represent a complex matrix as a real one acting on stacked
    (real, imag) coordinates."""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def _is_complex(m: np.ndarray) -> bool:
    return np.iscomplexobj(m) and bool(np.max(np.abs(m.imag)) > 0)


def _kernel_basis(m: np.ndarray, expected_rank: int | None = None,
                  sv_tol: float = DEFAULT_SV_TOL) -> np.ndarray:
    """Orthonormal kernel basis with an explicit singular-value gap."""
    _, svals, vh = np.linalg.svd(m)
    smax = svals[0] if len(svals) else 1.0
    if smax == 0.0:
        return np.eye(m.shape[1])
    cut = sv_tol * smax
    rank = int(np.sum(svals > cut))
    _demand_gap(svals, cut)
    if expected_rank is not None and rank < expected_rank:
        raise RankDrop(f"rank {rank} < expected {expected_rank}")
    return vh[rank:].conj().T


def _demand_gap(svals, cut, factor: float = 10.0):
    for s in svals:
        if cut / factor < s <= cut * factor:
            raise RankUnstable(
                f"singular value {s} within a factor {factor} of the "
                f"threshold {cut}"
            )


def _rank_and_gap(m: np.ndarray, sv_tol: float):
    _, svals, _ = np.linalg.svd(m)
    smax = float(svals[0])
    cut = sv_tol * smax
    _demand_gap(svals, cut)
    rank = int(np.sum(svals > cut))
    zeros = svals[svals <= cut]
    nonzeros = svals[svals > cut]
    if len(zeros) == 0 or len(nonzeros) == 0:
        gap = float("inf")
    else:
        gap = float(nonzeros[-1] / zeros[0]) if zeros[0] > 0 else float("inf")
    return rank, gap


def intersection_dim(a: SubspaceBasis, b: SubspaceBasis,
                     sv_tol: float = DEFAULT_SV_TOL):
    """dim(A) + dim(B) - rank([A B]) with the gap between the zero and
    nonzero singular-value groups reported."""
    m = np.hstack([a.vectors, b.vectors])
    if _is_complex(m):
        m = _realify(m)
        rank, gap = _rank_and_gap(m, sv_tol)
        if rank % 2:
            raise RankUnstable("odd real rank for a complex subspace pair")
        total = (a.vectors.shape[1] + b.vectors.shape[1])
        return total - rank // 2, gap
    rank, gap = _rank_and_gap(m, sv_tol)
    return a.dim + b.dim - rank, gap


def containment_defect(small: SubspaceBasis, big: SubspaceBasis) -> float:
    """Sine of the largest principal angle of `small` against `big`;
    zero iff the containment holds."""
    u = small.vectors
    q = big.vectors
    res = u - q @ (q.conj().T @ u)
    return float(np.linalg.norm(res, 2))


def _orthonormal(cols: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(cols)
    keep = np.abs(np.diag(r)) > 1e-13 * max(1.0, float(np.abs(r).max()))
    return q[:, keep]


def _basis_from_matrix(cols: np.ndarray) -> SubspaceBasis:
    if _is_complex(cols):
        cols = _realify(cols)
    q = _orthonormal(np.asarray(cols, dtype=cols.dtype))
    return SubspaceBasis(q.shape[0], q)


# ---------------------------------------------------------------------------
# tangent spaces and the distribution


def tangent_m_alpha(pchart: PhaseChart, z: PhasePoint,
                    sv_tol: float = DEFAULT_SV_TOL) -> SubspaceBasis:
    """Kernel of the 3-constraint Jacobian: the tangent space of the
    constraint variety at a valid phase point (expected dimension 6)."""
    coords = pchart.coords(z)
    defects = [abs(complex(value(g))) for g in pchart.constraints(coords)]
    if max(defects) > CONSTRAINT_TOL:
        raise ChartDegenerate(
            f"phase point violates the reflection constraints: {max(defects)}"
        )
    jac = pchart.constraint_jacobian(coords)
    if _is_complex(jac):
        kernel = _kernel_basis(_realify(jac), expected_rank=6, sv_tol=sv_tol)
    else:
        kernel = _kernel_basis(jac, expected_rank=3, sv_tol=sv_tol)
    return SubspaceBasis(kernel.shape[0], kernel)


def birkhoff_distribution(pchart: PhaseChart, z: PhasePoint) -> SubspaceBasis:
    """D(z): chart velocities with the B-velocity along T_B and the
    C-velocity along T_C (codimension 2, dimension 7)."""
    coords = [complex(value(c)) for c in pchart.coords(z)]
    tb, tc = coords[4], coords[8]
    rows = np.zeros((2, PhaseChart.DIM), dtype=complex)
    rows[0, 1] = tb
    rows[0, 2] = -1.0
    rows[1, 5] = tc
    rows[1, 6] = -1.0
    if max(abs(tb.imag), abs(tc.imag)) == 0.0:
        rows = rows.real
    kernel = _kernel_basis(rows if not _is_complex(rows) else _realify(rows))
    return SubspaceBasis(kernel.shape[0], kernel)


def family_phase_point(bil: Billiard, s, t) -> PhasePoint:
    """Triangular-orbit family point of a 3-reflective table: B and C ride
    their own boundary pieces, with T_B, T_C the actual curve tangents."""
    m_a, m_b, refl_a, refl_b, c = _closure_chain(bil, s, t)
    u3 = _third_vertex_param(bil.pieces[2], refl_a, c, bil.chart)
    m_c = bil.pieces[2].eval(u3)
    return PhasePoint(
        m_a, m_b.point, m_b.frame, m_b.tangent,
        m_c.point, m_c.frame, m_c.tangent,
    )


def family_coords(bil: Billiard, pchart: PhaseChart, s, t) -> list:
    """Chart coordinates of the family point, generic in (s, t) so duals
    pass through for tangent computations."""
    m_a, m_b, refl_a, refl_b, c = _closure_chain(bil, s, t)
    u3 = _third_vertex_param(bil.pieces[2], refl_a, c, bil.chart)
    m_c = bil.pieces[2].eval(u3)
    bu, bv = pchart.chart.to_affine(m_b.point)
    cu, cv = pchart.chart.to_affine(m_c.point)
    return [
        s,
        bu, bv,
        pchart.az_affine(m_b.frame), pchart.az_affine(m_b.tangent),
        cu, cv,
        pchart.az_affine(m_c.frame), pchart.az_affine(m_c.tangent),
    ]


def family_tangent(bil: Billiard, pchart: PhaseChart, s, t) -> SubspaceBasis:
    """T_z S of the orbit-family surface via forward-mode duals in (s, t)."""
    s0, t0 = value(s), value(t)
    cols = []
    for i in range(2):
        sd = Dual(s0, 1.0 if i == 0 else 0.0)
        td = Dual(t0, 1.0 if i == 1 else 0.0)
        cols.append([deriv(c) for c in family_coords(bil, pchart, sd, td)])
    mat = np.array(cols).T
    return _basis_from_matrix(mat)


@dataclass(frozen=True)
class RankRecord:
    coords: tuple
    dims: dict
    sv_gap: float
    containment: float

    def to_dict(self) -> dict:
        return {
            "coords": [_num_to_json(c) for c in self.coords],
            "dims": dict(self.dims),
            "sv_gap": self.sv_gap,
            "containment_defect": self.containment,
        }


def _num_to_json(x):
    x = value(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return float(x)


def restricted_rank(bil: Billiard, pchart: PhaseChart, s, t,
                    sv_tol: float = DEFAULT_SV_TOL) -> RankRecord:
    """Dimensions of D(z), T_z M_alpha and of the orbit-family tangent
    inside D(z) at the family point over (s, t)."""
    z = family_phase_point(bil, s, t)
    coords = pchart.coords(z)
    d_basis = birkhoff_distribution(pchart, z)
    tm_basis = tangent_m_alpha(pchart, z, sv_tol)
    s_basis = family_tangent(bil, pchart, s, t)
    dim_s_in_d, gap1 = intersection_dim(s_basis, d_basis, sv_tol)
    dim_tm_in_d, gap2 = intersection_dim(tm_basis, d_basis, sv_tol)
    complex_mode = any(isinstance(value(c), complex) for c in coords)
    div = 2 if complex_mode else 1
    raw_dims = {
        "D": d_basis.dim,
        "TM": tm_basis.dim,
        "S": s_basis.dim,
        "S_in_D": dim_s_in_d,
        "TM_in_D": dim_tm_in_d,
    }
    if complex_mode:
        for key, rd in raw_dims.items():
            if rd % 2:
                raise RankUnstable(f"odd real dimension for {key} in complex mode")
    dims = {key: rd // div for key, rd in raw_dims.items()}
    return RankRecord(
        tuple(coords), dims, min(gap1, gap2),
        containment_defect(s_basis, d_basis),
    )
