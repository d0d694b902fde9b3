"""Exception types raised by the geometry and dynamics layers."""


class GeometryError(Exception):
    """Base class for geometric degeneracies and numerical failures."""


class DegeneratePencil(GeometryError):
    """Cross-ratio reference triple is not pairwise distinct."""


class NotConcurrent(GeometryError):
    """The four lines of a pencil cross-ratio do not share a point."""


class AuxThroughCenter(GeometryError):
    """Auxiliary line of a pencil cross-ratio passes through the center."""


class DegeneratePair(GeometryError):
    """Harmonic conjugation asked with coincident fixed points."""


class LineIsReference(GeometryError):
    """Azimuth of the reference (infinity) line is undefined."""


class NotThroughPoint(GeometryError):
    """A line that must pass through a given point does not."""


class DegenerateFrame(GeometryError):
    """Frame line coincides with the tangent line."""


class PivotOnLine(GeometryError):
    """Pivot point of a line-with-pivot curve lies on the supporting line."""


class CollinearVertices(GeometryError):
    """Three points that must span a triangle are collinear."""


class DegenerateConic(GeometryError):
    """Conic parameters do not describe a nondegenerate conic."""


class TangentIncidence(GeometryError):
    """Chord is tangent to the boundary piece at a vertex."""


class NoIntersectionInDomain(GeometryError):
    """Reflected line misses the target piece inside its parameter domain."""


class FrameDegenerate(GeometryError):
    """Reflection frame is degenerate at the reflection point."""


class DegenerateConfiguration(GeometryError):
    """Closure construction hit one of the excluded configurations."""


class LeftDomain(GeometryError):
    """Orbit continuation or solver stepped outside a parameter domain."""


class LineNotThroughPoint(GeometryError):
    """Intersection-index query with a line missing the base point."""


class ChartDegenerate(GeometryError):
    """Requested object has no finite coordinates in the chosen chart."""


class RankDrop(GeometryError):
    """Constraint Jacobian lost rank at a phase-space point."""


class RankUnstable(GeometryError):
    """Singular-value spectrum has no clean zero/nonzero gap."""


class ViewportDegenerate(GeometryError):
    """Plot viewport has zero or negative extent."""


class NoConvergence(GeometryError):
    """Newton search failed; carries the best residual reached."""

    def __init__(self, best_residual, iterations):
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(best residual {best_residual})"
        )
        self.best_residual = best_residual
        self.iterations = iterations


class ConfigError(Exception):
    """Configuration file is invalid; message carries the location."""
