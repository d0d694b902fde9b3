"""Projective billiards: reflection law, right-spherical tables, orbit
dynamics, azimuth asymptotics and the rank of the Birkhoff distribution."""

from .projective import (
    AffineChart,
    IDENTITY_CHART,
    P1Value,
    PLine,
    PPoint,
    PencilChart,
    affine_point,
    azimuth,
    cross_ratio_lines,
    cross_ratio_points,
    harmonic_conjugate,
    incident,
    join,
    line,
    meet,
    point,
    reflect_azimuth,
    reflect_line,
)
from .curves import (
    Billiard,
    Ellipse,
    FramedCurve,
    FramedPoint,
    GraphCurve,
    LineWithPivot,
    euclidean_normal_frame,
    omega,
    omega_segment,
    right_spherical,
)
from .dynamics import (
    Orbit,
    OrbitVertex,
    ScanReport,
    billiard_map,
    closure_orbit,
    closure_residual,
    find_periodic,
    iterate_orbit,
    scan,
)
from .asymptotics import (
    asymptotics_experiment,
    conic_self_table,
    fit_log_slope,
    intersection_index,
    leading_reflection_table,
    transverse_table,
)
from .birkhoff import (
    PhaseChart,
    PhasePoint,
    SubspaceBasis,
    birkhoff_distribution,
    family_phase_point,
    family_tangent,
    restricted_rank,
    tangent_m_alpha,
)
from .space3 import (
    Line3,
    make_orbit_3d,
    orbit_planarity_check,
    plane_through,
    planarity_defect,
    reflect_nd,
)
from .sphere import (
    great_circle_line,
    octant_orbit,
    pole_frame_line,
    spherical_project,
    spherical_reflect,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
