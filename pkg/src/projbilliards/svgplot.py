"""SVG rendering of boundary pieces, frame ticks and orbits.

Coordinates are flipped to the mathematical orientation (y up); the
viewBox comes from the configured viewport.  Output is a deterministic
function of the input geometry.
"""

from __future__ import annotations

from .errors import ChartDegenerate, ViewportDegenerate

PIECE_SAMPLES = 256
TICK_EVERY = 16

_STYLE = {
    "piece": 'stroke="black" fill="none"',
    "tick": 'stroke="#2060c0" fill="none"',
    "orbit": 'stroke="#c03030" fill="none"',
}


def _fmt(x: float) -> str:
    return "%.8g" % x


class _Canvas:
    def __init__(self, viewport):
        xmin, ymin, xmax, ymax = viewport
        if not (xmax > xmin and ymax > ymin):
            raise ViewportDegenerate(f"bad viewport {viewport!r}")
        self.viewport = viewport
        self.parts = []
        self.width = xmax - xmin
        self.height = ymax - ymin
        self.stroke = max(self.width, self.height) / 400.0

    def flip(self, x, y):
        xmin, ymin, xmax, ymax = self.viewport
        return x, (ymax + ymin) - y

    def polyline(self, pts, style: str):
        if len(pts) < 2:
            return
        coords = " ".join(
            f"{_fmt(px)},{_fmt(py)}" for px, py in (self.flip(*p) for p in pts)
        )
        self.parts.append(
            f'<polyline points="{coords}" {style} '
            f'stroke-width="{_fmt(self.stroke)}"/>'
        )

    def polygon(self, pts, style: str):
        coords = " ".join(
            f"{_fmt(px)},{_fmt(py)}" for px, py in (self.flip(*p) for p in pts)
        )
        self.parts.append(
            f'<polygon points="{coords}" {style} '
            f'stroke-width="{_fmt(1.5 * self.stroke)}"/>'
        )

    def render(self) -> str:
        xmin, ymin, _, _ = self.viewport
        body = "\n".join(self.parts)
        return (
            '<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{_fmt(xmin)} {_fmt(ymin)} {_fmt(self.width)} '
            f'{_fmt(self.height)}">\n{body}\n</svg>\n'
        )


def _sample_points(piece, chart, n: int):
    lo, hi = float(piece.domain[0]), float(piece.domain[1])
    pts = []
    for i in range(n):
        t = lo + (hi - lo) * i / (n - 1)
        try:
            u, v = chart.to_affine(piece.point_at(t))
        except ChartDegenerate:
            pts.append(None)
            continue
        pts.append((float(u), float(v), t))
    return pts


def _frame_tick(piece, chart, t, length: float):
    try:
        u, v = chart.to_affine(piece.point_at(t))
        az = chart.line_azimuth(piece.frame_at(t))
    except ChartDegenerate:
        return None
    du, dv = float(az.v), float(az.u)
    norm = (du * du + dv * dv) ** 0.5
    if norm == 0.0:
        return None
    du, dv = du / norm * length, dv / norm * length
    u, v = float(u), float(v)
    return [(u - du, v - dv), (u + du, v + dv)]


def render_billiard(bil, orbits=(), viewport=(-0.2, -0.2, 1.2, 1.2)) -> str:
    """SVG for the boundary pieces (polylines), frame ticks (every 16th
    sample) and any orbits (closed polygons)."""
    canvas = _Canvas(viewport)
    tick_len = max(canvas.width, canvas.height) / 60.0
    for piece in bil.pieces:
        pts = _sample_points(piece, bil.chart, PIECE_SAMPLES)
        run = []
        for p in pts:
            if p is None:
                canvas.polyline([q[:2] for q in run], _STYLE["piece"])
                run = []
            else:
                run.append(p)
        canvas.polyline([q[:2] for q in run], _STYLE["piece"])
        for p in pts[::TICK_EVERY]:
            if p is None:
                continue
            tick = _frame_tick(piece, bil.chart, p[2], tick_len)
            if tick:
                canvas.polyline(tick, _STYLE["tick"])
    for orbit in orbits:
        pts = []
        for vert in orbit.vertices:
            try:
                u, v = bil.chart.to_affine(vert.framed.point)
            except ChartDegenerate:
                continue
            pts.append((float(u), float(v)))
        if len(pts) >= 2:
            canvas.polygon(pts, _STYLE["orbit"])
    return canvas.render()
