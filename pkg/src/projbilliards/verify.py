"""Verification suites: each packages one family of checks into a
machine-readable pass/fail report.

Suites: right-spherical (exact 3-reflectivity / falsification), spherical
projection (orbit correspondence), asymptotics (azimuth ratios and
convergence order), birkhoff-rank (restricted rank 2) and planarity-3d
(spatial orbits stay in their vertex plane).
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from .asymptotics import asymptotics_experiment
from .birkhoff import PhaseChart, restricted_rank
from .curves import right_spherical
from .dynamics import closure_orbit, closure_residual
from .errors import GeometryError
from .projective import (
    AffineChart,
    PPoint,
    join,
    p1_defect,
    reflect_azimuth,
)
from .scalars import RATIONAL, all_exact
from .space3 import (
    Line3,
    line_through_point_defect,
    make_orbit_3d,
    orbit_planarity_check,
    reflect_nd,
)
from .sphere import octant_orbit, random_octant_start, spherical_project

SUITES = (
    "right-spherical",
    "spherical-projection",
    "asymptotics",
    "birkhoff-rank",
    "planarity-3d",
)


def _check(name: str, passed: bool, **values) -> dict:
    rec = {"name": name, "passed": bool(passed)}
    rec.update(values)
    return rec


def _report(suite: str, checks) -> dict:
    return {
        "suite": suite,
        "passed": all(c["passed"] for c in checks),
        "checks": list(checks),
    }


def _random_param(rng, domain, exact: bool):
    lo, hi = domain
    if exact:
        frac = Fraction(rng.randrange(0, 10001), 10000)
        return lo + (hi - lo) * frac
    return float(lo) + (float(hi) - float(lo)) * rng.random()


def right_spherical_suite(bil, mode: str, count: int, tol: float,
                          seed: int) -> dict:
    """Closure residual at random parameter pairs: identically zero for a
    genuine right-spherical table, nonzero otherwise."""
    rng = random.Random(seed)
    exact = mode == RATIONAL
    dom0, dom1 = bil.pieces[0].domain, bil.pieces[1].domain
    max_residual = Fraction(0) if exact else 0.0
    nonzero = 0
    degenerate = 0
    for _ in range(count):
        s = _random_param(rng, dom0, exact)
        t = _random_param(rng, dom1, exact)
        try:
            r = closure_residual(bil, s, t)
        except GeometryError:
            degenerate += 1
            continue
        if r > max_residual:
            max_residual = r
        if (r != 0) if exact else (float(r) > tol):
            nonzero += 1
    checks = [
        _check(
            "closure-residual-zero",
            nonzero == 0,
            samples=count,
            nonzero=nonzero,
            degenerate=degenerate,
            max_residual=float(max_residual),
            tol=0.0 if exact else tol,
            exact=exact,
        )
    ]
    return _report("right-spherical", checks)


def _octant_image_billiard():
    """Projective image of the three framed orthogonal great circles: the
    right-spherical table of the projected axis points, in a chart that
    keeps all three of them finite."""
    chart = AffineChart.from_matrix(((1, 1, 1), (0, 1, 0), (0, 0, 1)))
    p = PPoint((1, 0, 0))
    q = PPoint((0, 1, 0))
    r = PPoint((0, 0, 1))
    return right_spherical(
        p, q, r, chart=chart,
        domain=(Fraction(1, 1000), Fraction(999, 1000)),
    )


def spherical_projection_suite(count: int, tol: float, seed: int) -> dict:
    """Random orbits of the right-angled spherical triangle project to
    triangular orbits of the right-spherical table."""
    rng = random.Random(seed)
    bil = _octant_image_billiard()
    chart = bil.chart
    worst_vertex = 0.0
    worst_close = 0.0
    failures = 0
    produced = 0
    while produced < count:
        p0, u0 = random_octant_start(rng)
        try:
            impacts, (p_end, _) = octant_orbit(p0, u0, bounces=3)
        except GeometryError:
            continue
        produced += 1
        worst_close = max(worst_close, float(np.linalg.norm(p_end - p0)))
        by_mirror = {idx: spherical_project(pt) for pt, idx in impacts}
        by_mirror[0] = spherical_project(p0)
        if len(by_mirror) != 3:
            failures += 1
            continue
        # mirror z=0 carries piece 0 (PQ), y=0 piece 1 (PR), x=0 piece 2
        x1, x2, x3 = by_mirror[0], by_mirror[1], by_mirror[2]
        try:
            s = bil.pieces[0].param_of_point(x1)
            t = bil.pieces[1].param_of_point(x2)
            orbit = closure_orbit(bil, s, t)
            cu, cv = chart.to_affine(orbit.vertices[2].framed.point)
            xu, xv = chart.to_affine(x3)
        except GeometryError:
            failures += 1
            continue
        mismatch = math.hypot(float(cu - xu), float(cv - xv))
        worst_vertex = max(worst_vertex, mismatch)
        if mismatch > tol:
            failures += 1
    checks = [
        _check("spherical-orbits-close", worst_close <= 1e-9,
               worst_closure=worst_close, samples=count),
        _check("projected-vertex-match", failures == 0,
               worst_vertex_mismatch=worst_vertex, tol=tol,
               failures=failures, samples=count),
    ]
    return _report("spherical-projection", checks)


def asymptotics_suite(bound_factor: float = 3.0,
                      min_slope: float = 0.9) -> dict:
    """Measured azimuth ratios against their limits with C|z| envelopes
    and fitted convergence order."""
    tables = asymptotics_experiment()
    checks = []
    for name, table in tables.items():
        env_ok = all(
            abs(r.zprime_over_z - table.zprime_limit) <= bound_factor * r.z
            and abs(r.zstar_over_z - table.zstar_limit) <= bound_factor * r.z
            for r in table.rows
        )
        slope_ok = (table.slope_zprime >= min_slope
                    and table.slope_zstar >= min_slope)
        ep, es = table.max_error()
        checks.append(_check(
            f"asymptotics-{name}",
            env_ok and slope_ok,
            index=table.index,
            zprime_limit=table.zprime_limit,
            zstar_limit=table.zstar_limit,
            slope_zprime=table.slope_zprime,
            slope_zstar=table.slope_zstar,
            max_error_zprime=ep,
            max_error_zstar=es,
            bound_factor=bound_factor,
        ))
    return _report("asymptotics", checks)


def birkhoff_rank_suite(samples: int, sv_tol: float, seed: int,
                        containment_tol: float = 1e-9,
                        min_gap: float = 1e6) -> dict:
    """Restricted rank of the distribution on the orbit-family surface at
    random family points of the right-spherical table."""
    rng = random.Random(seed)
    from .projective import affine_point

    bil = right_spherical(
        affine_point(0.0, 0.0), affine_point(0.0, 1.0), affine_point(1.0, 0.0),
        domain=(0.05, 0.95),
    )
    pchart = PhaseChart(bil.pieces[0])
    records = []
    bad_dims = 0
    worst_containment = 0.0
    worst_gap = float("inf")
    for _ in range(samples):
        s = rng.uniform(0.1, 0.9)
        t = rng.uniform(0.1, 0.9)
        rec = restricted_rank(bil, pchart, s, t, sv_tol)
        records.append(rec.to_dict())
        if not (rec.dims["D"] == 7 and rec.dims["TM"] == 6
                and rec.dims["S_in_D"] == 2):
            bad_dims += 1
        worst_containment = max(worst_containment, rec.containment)
        worst_gap = min(worst_gap, rec.sv_gap)
    checks = [
        _check("rank-dimensions", bad_dims == 0, samples=samples,
               bad_points=bad_dims, expected={"D": 7, "TM": 6, "S_in_D": 2}),
        _check("family-inside-distribution",
               worst_containment <= containment_tol,
               worst_containment=worst_containment, tol=containment_tol),
        _check("singular-value-gap", worst_gap >= min_gap,
               worst_gap=worst_gap, min_gap=min_gap),
    ]
    report = _report("birkhoff-rank", checks)
    report["points"] = records
    return report


def planarity_suite(count: int, tol: float, seed: int,
                    law_tol: float = 1e-9) -> dict:
    """Random spatial triangular orbits: the six lines stay in the vertex
    plane and the spatial reflection law reproduces the outgoing chords."""
    rng = random.Random(seed)
    worst_plan = 0.0
    worst_law = 0.0
    produced = 0
    while produced < count:
        verts = [
            (1.0, rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
            for _ in range(3)
        ]
        planes = []
        for v in verts:
            g = np.array([rng.uniform(-1, 1) for _ in range(4)])
            vv = np.array(v)
            h = g - (g @ vv) / (vv @ vv) * vv
            if np.linalg.norm(h) < 0.2:
                break
            planes.append(tuple(h))
        if len(planes) != 3:
            continue
        try:
            orbit = make_orbit_3d(verts, planes)
        except GeometryError:
            continue
        produced += 1
        worst_plan = max(worst_plan, orbit_planarity_check(orbit))
        for rec in orbit:
            out = reflect_nd(rec["point"], rec["incoming"], rec["frame"],
                             rec["tangent_plane"])
            defect = max(
                line_through_point_defect(out, rec["outgoing"].p),
                line_through_point_defect(out, rec["outgoing"].q),
            )
            worst_law = max(worst_law, defect)
    checks = [
        _check("orbit-planarity", worst_plan <= tol,
               worst_defect=worst_plan, tol=tol, samples=count),
        _check("spatial-law-reproduction", worst_law <= law_tol,
               worst_defect=worst_law, tol=law_tol),
    ]
    return _report("planarity-3d", checks)


def run_suite(name: str, cfg) -> dict:
    """Dispatch a named suite with parameters from a parsed Config."""
    run = cfg.run
    if name == "right-spherical":
        bil = cfg.billiard
        if bil is None:
            raise GeometryError("right-spherical suite needs a billiard")
        count = run.count if run.count else 10000
        return right_spherical_suite(bil, cfg.field_mode, count, run.tol,
                                     cfg.seed)
    if name == "spherical-projection":
        return spherical_projection_suite(min(run.count, 100) or 100,
                                          1e-9, cfg.seed)
    if name == "asymptotics":
        return asymptotics_suite()
    if name == "birkhoff-rank":
        return birkhoff_rank_suite(run.samples, run.sv_tol, cfg.seed)
    if name == "planarity-3d":
        return planarity_suite(min(run.count, 1000) or 1000, 1e-12, cfg.seed)
    raise GeometryError(f"unknown suite {name!r}; pick one of {SUITES}")
