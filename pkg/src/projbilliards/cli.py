"""Command-line interface: orbit traces, verification suites, residual
scans and SVG plots, all driven by a JSON config.

Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 numerical
failure.  Every subcommand writes machine-readable output into the output
directory and a human summary to stdout; outputs are byte-deterministic
for a fixed config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import Config, load_config, parse_config
from .dynamics import closure_orbit, iterate_orbit, scan
from .errors import ConfigError, GeometryError, NoConvergence, RankUnstable
from .scalars import FIELD_MODES
from .svgplot import render_billiard
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--field", choices=FIELD_MODES, default=None,
                        help="override the config's field mode")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the run tolerance")
    parser.add_argument("--grid", type=int, default=None,
                        help="override the scan grid size")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the RNG seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projbilliards",
        description="projective billiard experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("orbit", "iterate reflections and emit the orbit trace"),
        ("scan", "closure-residual grid scan (CSV + stats)"),
        ("plot", "SVG picture of the table and optional orbits"),
    ):
        p = sub.add_parser(name, help=desc)
        _add_common(p)
    pv = sub.add_parser("verify", help="run a named verification suite")
    pv.add_argument("suite", choices=SUITES, nargs="?", default=None)
    _add_common(pv)
    return parser


def _load(args) -> Config:
    with open(args.config, "r", encoding="utf-8") as fh:
        text = fh.read()
    if args.field is not None:
        raw = json.loads(text)
        raw["field_mode"] = args.field
        text = json.dumps(raw)
    cfg = parse_config(text)
    updates = {}
    if args.tol is not None:
        updates["tol"] = args.tol
    if args.grid is not None:
        updates["grid"] = args.grid
    run = cfg.run
    if updates:
        from dataclasses import replace

        run = replace(run, **updates)
    seed = args.seed if args.seed is not None else cfg.seed
    return Config(cfg.field_mode, seed, cfg.billiard, run, cfg.raw)


def _write(out_dir: str, name: str, payload: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(payload)
    return path


def _json_payload(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_orbit(cfg: Config, out_dir: str) -> int:
    bil = cfg.billiard
    if bil is None:
        raise ConfigError("orbit needs a billiard in the config")
    if len(cfg.run.seed_params) < 2:
        raise ConfigError("orbit needs run.seed_params = [s, t]")
    orbit = iterate_orbit(bil, cfg.run.seed_params[:2], cfg.run.steps,
                          cfg.run.start_piece)
    defects = orbit.reflection_defects(bil.chart)
    trace = []
    for vert, defect in zip(orbit.vertices, defects):
        u, v = bil.chart.to_affine(vert.framed.point)
        trace.append({
            "piece": vert.framed.curve_id,
            "param": float(vert.framed.param),
            "point": [float(u), float(v)],
            "reflection_defect": defect,
        })
    report = {
        "command": "orbit",
        "steps": cfg.run.steps,
        "max_defect": max(defects) if defects else 0.0,
        "vertices": trace,
    }
    path = _write(out_dir, "report.json", _json_payload(report))
    if cfg.run.viewport is not None:
        svg = render_billiard(bil, [orbit], cfg.run.viewport)
        _write(out_dir, "plot.svg", svg)
    print(f"orbit: {len(trace)} vertices, max reflection defect "
          f"{report['max_defect']:.3e} -> {path}")
    return EXIT_OK


def cmd_scan(cfg: Config, out_dir: str) -> int:
    bil = cfg.billiard
    if bil is None:
        raise ConfigError("scan needs a billiard in the config")
    report = scan(bil, cfg.run.grid, cfg.run.tol)
    csv_path = _write(out_dir, "scan.csv", report.to_csv())
    stats = report.stats()
    stats["command"] = "scan"
    _write(out_dir, "report.json", _json_payload(stats))
    print(
        f"scan {report.grid}x{report.grid}: fraction below tol "
        f"{report.fraction_below_tol:.4f}, max residual "
        f"{report.max_residual:.3e}, degenerate {report.degenerate_cells} "
        f"-> {csv_path}"
    )
    return EXIT_OK


def cmd_plot(cfg: Config, out_dir: str) -> int:
    bil = cfg.billiard
    if bil is None:
        raise ConfigError("plot needs a billiard in the config")
    orbits = []
    if len(cfg.run.seed_params) >= 2 and len(bil.pieces) >= 3:
        try:
            orbits.append(closure_orbit(bil, cfg.run.seed_params[0],
                                        cfg.run.seed_params[1]))
        except GeometryError:
            pass
    viewport = cfg.run.viewport or (-0.2, -0.2, 1.2, 1.2)
    svg = render_billiard(bil, orbits, viewport)
    path = _write(out_dir, "plot.svg", svg)
    print(f"plot: {len(bil.pieces)} pieces, {len(orbits)} orbits -> {path}")
    return EXIT_OK


def cmd_verify(cfg: Config, suite: str | None, out_dir: str) -> int:
    name = suite or cfg.run.suite
    if name is None:
        raise ConfigError("verify needs a suite name (argument or run.suite)")
    report = run_suite(name, cfg)
    report["command"] = "verify"
    _write(out_dir, "report.json", _json_payload(report))
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        extras = {k: v for k, v in check.items()
                  if k not in ("name", "passed") and isinstance(v, (int, float))}
        extra_txt = ", ".join(f"{k}={v:.3e}" if isinstance(v, float)
                              else f"{k}={v}" for k, v in sorted(extras.items()))
        print(f"{status} {check['name']}  {extra_txt}")
    print(f"suite {name}: {'PASS' if report['passed'] else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _load(args)
        if args.command == "orbit":
            return cmd_orbit(cfg, args.out)
        if args.command == "scan":
            return cmd_scan(cfg, args.out)
        if args.command == "plot":
            return cmd_plot(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoConvergence, RankUnstable) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GeometryError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
