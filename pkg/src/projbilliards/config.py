"""JSON configuration: field mode, billiard description, run parameters.

Unknown keys are errors and every failure message carries a location
(line/column for syntax errors, the key path plus line/column of the
offending key otherwise), so exact rational inputs either parse
bit-exactly or fail loudly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .curves import (
    Billiard,
    Ellipse,
    GraphCurve,
    omega_segment,
    right_spherical,
)
from .errors import ConfigError
from .projective import AffineChart, IDENTITY_CHART, PPoint
from .scalars import FIELD_MODES, RATIONAL, parse_scalar

_RUN_KEYS = {
    "grid", "tol", "count", "k", "seed_params", "steps", "start_piece",
    "viewport", "suite", "sv_tol", "samples",
}
_TOP_KEYS = {"field_mode", "seed", "billiard", "run"}


def _located(text: str, key: str) -> str:
    """Best-effort line/column of a key in the raw config text."""
    needle = f'"{key}"'
    pos = text.find(needle)
    if pos < 0:
        return ""
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f" (line {line}, column {col})"


@dataclass(frozen=True)
class RunConfig:
    grid: int = 50
    tol: float = 1e-9
    count: int = 10000
    k: int = 3
    seed_params: tuple = ()
    steps: int = 3
    start_piece: int = 0
    viewport: tuple | None = None
    suite: str | None = None
    sv_tol: float = 1e-8
    samples: int = 20


@dataclass(frozen=True)
class Config:
    field_mode: str
    seed: int
    billiard: Billiard | None
    run: RunConfig
    raw: dict = field(repr=False, default_factory=dict)


def _require_keys(obj: dict, allowed: set, where: str, text: str):
    for key in obj:
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in {where}{_located(text, key)}"
            )


def _scalar(value, mode, where, text):
    try:
        return parse_scalar(value, mode)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad number in {where}: {exc}{_located(text, where)}")


def _point(values, mode, where, text) -> PPoint:
    if not isinstance(values, list) or len(values) != 2:
        raise ConfigError(f"{where} must be an affine pair [u, v]")
    u = _scalar(values[0], mode, where, text)
    v = _scalar(values[1], mode, where, text)
    one = 1 if mode == RATIONAL else 1.0
    return PPoint((one, u, v))


def _interval(values, mode, where, text):
    if not isinstance(values, list) or len(values) != 2:
        raise ConfigError(f"{where} must be an interval [lo, hi]")
    lo = _scalar(values[0], mode, where, text)
    hi = _scalar(values[1], mode, where, text)
    if mode != RATIONAL:
        lo, hi = float(lo.real if isinstance(lo, complex) else lo), float(
            hi.real if isinstance(hi, complex) else hi
        )
    if not (float(lo) < float(hi)):
        raise ConfigError(f"{where}: empty interval")
    return (lo, hi)


def _build_piece(desc: dict, mode: str, idx: int, text: str):
    where = f"billiard.pieces[{idx}]"
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError(f"{where} needs a 'kind'")
    kind = desc["kind"]
    name = desc.get("id", f"piece{idx}")
    if kind == "line_with_pivot":
        _require_keys(desc, {"kind", "id", "a0", "a1", "pivot", "domain"},
                      where, text)
        return omega_segment(
            _point(desc["a0"], mode, f"{where}.a0", text),
            _point(desc["a1"], mode, f"{where}.a1", text),
            _point(desc["pivot"], mode, f"{where}.pivot", text),
            name,
            _interval(desc.get("domain", [0, 1] if mode == RATIONAL else
                               [0.0, 1.0]), mode, f"{where}.domain", text),
        )
    if kind in ("conic_normal", "conic_with_pivot"):
        allowed = {"kind", "id", "center", "semi_axes", "domain", "pivot"}
        _require_keys(desc, allowed, where, text)
        if mode == RATIONAL:
            raise ConfigError(f"{where}: conic pieces need a floating mode")
        cx, cy = (float(_scalar(v, "f64", where, text))
                  for v in desc.get("center", [0.0, 0.0]))
        rx, ry = (float(_scalar(v, "f64", where, text))
                  for v in desc.get("semi_axes", [1.0, 1.0]))
        domain = tuple(desc.get("domain", (-math.pi, math.pi)))
        if kind == "conic_normal":
            return Ellipse(cx, cy, rx, ry, name, domain)
        return Ellipse(cx, cy, rx, ry, name, domain, frame_kind="pivot",
                       pivot=_point(desc["pivot"], "f64", f"{where}.pivot",
                                    text))
    if kind == "graph_curve":
        _require_keys(desc, {"kind", "id", "f_coeffs", "frame_az_coeffs",
                             "domain"}, where, text)
        f_coeffs = tuple(
            _scalar(v, mode, f"{where}.f_coeffs", text)
            for v in desc["f_coeffs"]
        )
        g_coeffs = tuple(
            _scalar(v, mode, f"{where}.frame_az_coeffs", text)
            for v in desc["frame_az_coeffs"]
        )
        return GraphCurve(f_coeffs, g_coeffs, name,
                          _interval(desc["domain"], mode,
                                    f"{where}.domain", text))
    raise ConfigError(f"{where}: unknown piece kind {kind!r}")


def _build_billiard(desc: dict, mode: str, text: str) -> Billiard:
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("billiard needs a 'kind'")
    kind = desc["kind"]
    if kind == "right_spherical":
        allowed = {"kind", "P", "Q", "R", "domain", "pivot_shift", "chart"}
        _require_keys(desc, allowed, "billiard", text)
        chart = IDENTITY_CHART
        if "chart" in desc:
            rows = [
                [_scalar(v, mode, "billiard.chart", text) for v in row]
                for row in desc["chart"]
            ]
            chart = AffineChart.from_matrix(rows)
        kwargs = {}
        if "domain" in desc:
            kwargs["domain"] = _interval(desc["domain"], mode,
                                         "billiard.domain", text)
        if "pivot_shift" in desc:
            shift = desc["pivot_shift"]
            _require_keys(shift, {"piece", "delta"},
                          "billiard.pivot_shift", text)
            kwargs["pivot_shift"] = (
                int(shift["piece"]),
                tuple(_scalar(v, mode, "billiard.pivot_shift", text)
                      for v in shift["delta"]),
            )
        return right_spherical(
            _point(desc["P"], mode, "billiard.P", text),
            _point(desc["Q"], mode, "billiard.Q", text),
            _point(desc["R"], mode, "billiard.R", text),
            chart=chart, **kwargs,
        )
    if kind == "pieces":
        _require_keys(desc, {"kind", "pieces"}, "billiard", text)
        pieces = [
            _build_piece(p, mode, i, text)
            for i, p in enumerate(desc["pieces"])
        ]
        return Billiard(tuple(pieces))
    raise ConfigError(f"unknown billiard kind {kind!r}")


def parse_config(text: str) -> Config:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        )
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(raw, _TOP_KEYS, "config", text)
    mode = raw.get("field_mode", "f64")
    if mode not in FIELD_MODES:
        raise ConfigError(
            f"field_mode must be one of {FIELD_MODES}, got {mode!r}"
            f"{_located(text, 'field_mode')}"
        )
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    billiard = None
    if "billiard" in raw:
        billiard = _build_billiard(raw["billiard"], mode, text)
    run_raw = raw.get("run", {})
    _require_keys(run_raw, _RUN_KEYS, "run", text)
    seed_params = tuple(
        parse_scalar(v, mode) for v in run_raw.get("seed_params", [])
    )
    viewport = None
    if "viewport" in run_raw:
        vp = run_raw["viewport"]
        if not isinstance(vp, list) or len(vp) != 4:
            raise ConfigError("run.viewport must be [xmin, ymin, xmax, ymax]")
        viewport = tuple(float(v) for v in vp)
    run = RunConfig(
        grid=int(run_raw.get("grid", 50)),
        tol=float(run_raw.get("tol", 1e-9)),
        count=int(run_raw.get("count", 10000)),
        k=int(run_raw.get("k", 3)),
        seed_params=seed_params,
        steps=int(run_raw.get("steps", 3)),
        start_piece=int(run_raw.get("start_piece", 0)),
        viewport=viewport,
        suite=run_raw.get("suite"),
        sv_tol=float(run_raw.get("sv_tol", 1e-8)),
        samples=int(run_raw.get("samples", 20)),
    )
    return Config(mode, seed, billiard, run, raw)


def load_config(path: str) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}")
    return parse_config(text)
