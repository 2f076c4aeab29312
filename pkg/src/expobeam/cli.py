"""Command-line front end: run scenarios, dump codebooks, render SVGs.

Exit codes: 0 success, 2 bad config / missing inputs, 3 near-field
geometry.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .codebook import build_codebook
from .config import ConfigError, config_to_dict, load_config, named_pose
from .exposure import NearFieldError
from .render import RenderError, cdf_svg, heatmap_svg, read_csv_columns
from .scenario import ScenarioResult, level_label, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NEAR_FIELD = 3

OUTPUT_ROOT_ENV = "EXPOBEAM_OUT"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _write_results(result: ScenarioResult, out: Path) -> None:
    cfg = result.config
    grid = cfg.grid
    finest = min(cfg.crossover_levels)

    for combo in result.combos.values():
        if combo.level != finest:
            continue
        tag = "on" if combo.avoidance else "off"
        rows = []
        for ix in range(grid.nx):
            for iy in range(grid.ny):
                rows.append([
                    _fmt(grid.x(ix)), _fmt(grid.y(iy)),
                    _fmt(combo.exposure_map[ix, iy]),
                    combo.beam_map_m[ix, iy], combo.beam_map_n[ix, iy],
                    _fmt(combo.d0_map[ix, iy]),
                ])
        _write_csv(out / f"exposure_map_{tag}.csv",
                   ["x", "y", "power_density_mw_cm2", "beam_m", "beam_n", "d0_applied"],
                   rows)

    rows = []
    for combo in result.combos.values():
        tag = "on" if combo.avoidance else "off"
        label = level_label(combo.level)
        for v in combo.exposure_mw_cm2:
            rows.append([label, tag, _fmt(v)])
    _write_csv(out / "exposure_cdf.csv",
               ["codebook", "avoidance", "power_density_mw_cm2"], rows)

    for combo in result.combos.values():
        tag = "on" if combo.avoidance else "off"
        name = f"snr_cdf_{level_label(combo.level)}_{tag}.csv"
        _write_csv(out / name, ["snr_db"], [[_fmt(v)] for v in combo.snr_db])

    summary = {
        "seed": cfg.seed,
        "tool_version": __version__,
        "config": config_to_dict(cfg),
        "combos": {
            key: {
                **combo.percentiles(),
                "trigger_rate": combo.trigger_rate,
                "mute_rate": combo.mute_rate,
                "samples": int(combo.exposure_mw_cm2.size),
            }
            for key, combo in result.combos.items()
        },
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.pose is not None:
        cfg = replace(cfg, pose=named_pose(args.pose))
    if args.codebook != "both":
        level = 3.0 if args.codebook == "3db" else 0.5
        if level not in cfg.crossover_levels:
            print(f"error: codebook {args.codebook} not in configured levels",
                  file=sys.stderr)
            return EXIT_CONFIG
        cfg = replace(cfg, crossover_levels=(level,))

    root = args.out or os.environ.get(OUTPUT_ROOT_ENV, "runs")
    out = Path(root)

    try:
        cfg.validate()
    except NearFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEAR_FIELD
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    manifest = {
        "config_path": str(args.config),
        "config": config_to_dict(cfg),
        "seed": cfg.seed,
        "tool_version": __version__,
        "output_dir": str(out),
        "duration_s": None,
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)

    avoidance_modes = {"on": (True,), "off": (False,), "both": (False, True)}[args.avoidance]
    result = run_scenario(cfg, workers=args.workers)
    if avoidance_modes != (False, True):
        keep = {k: c for k, c in result.combos.items() if c.avoidance in avoidance_modes}
        result = ScenarioResult(config=cfg, combos=keep)
    _write_results(result, out)

    manifest["duration_s"] = round(time.monotonic() - started, 3)
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    print(f"wrote results to {out}")
    return EXIT_OK


def cmd_codebook(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cb = build_codebook(cfg.array, cfg.sector, args.crossover, cfg.codebook_axes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    writer = csv.writer(sys.stdout if args.out is None else open(args.out, "w", newline=""))
    writer.writerow(["m", "n", "steer_az_deg", "steer_tilt_deg"])
    for beam in cb.beams():
        d = cb.steering(beam)
        writer.writerow([beam.m, beam.n, _fmt(d.azimuth_deg), _fmt(d.downtilt_deg)])
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    result_dir = Path(args.result_dir)
    if not result_dir.is_dir():
        print(f"error: {result_dir}: not a directory", file=sys.stderr)
        return EXIT_CONFIG
    maps = sorted(result_dir.glob("exposure_map_*.csv"))
    cdfs = sorted(result_dir.glob("snr_cdf_*.csv"))
    exposure_cdf = result_dir / "exposure_cdf.csv"
    if not maps and not cdfs and not exposure_cdf.exists():
        print(f"error: {result_dir}: no result CSVs found", file=sys.stderr)
        return EXIT_CONFIG

    threshold = args.limit
    try:
        for path in maps:
            cols = read_csv_columns(str(path))
            svg = heatmap_svg(
                [float(v) for v in cols["x"]],
                [float(v) for v in cols["y"]],
                [float(v) for v in cols["power_density_mw_cm2"]],
                threshold=threshold,
                title=path.stem,
            )
            path.with_suffix(".svg").write_text(svg, encoding="utf-8")
        for path in cdfs:
            cols = read_csv_columns(str(path))
            svg = cdf_svg({path.stem: [float(v) for v in cols["snr_db"]]},
                          title=path.stem)
            path.with_suffix(".svg").write_text(svg, encoding="utf-8")
        if exposure_cdf.exists():
            cols = read_csv_columns(str(exposure_cdf))
            series: dict[str, list[float]] = {}
            for cbk, av, v in zip(cols["codebook"], cols["avoidance"],
                                  cols["power_density_mw_cm2"]):
                series.setdefault(f"{cbk}_{av}", []).append(float(v))
            svg = cdf_svg(series, title="exposure_cdf")
            exposure_cdf.with_suffix(".svg").write_text(svg, encoding="utf-8")
    except (RenderError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"rendered SVGs in {result_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expobeam",
        description="Exposure-aware mmWave beam selection simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the Monte-Carlo scenario")
    p_run.add_argument("config", help="TOML config file")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help=f"output dir (default ${OUTPUT_ROOT_ENV} or ./runs)")
    p_run.add_argument("--pose", choices=["A", "B"], default=None)
    p_run.add_argument("--codebook", choices=["3db", "0.5db", "both"], default="both")
    p_run.add_argument("--avoidance", choices=["on", "off", "both"], default="both")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.set_defaults(func=cmd_run)

    p_cb = sub.add_parser("codebook", help="dump a codebook as CSV")
    p_cb.add_argument("config", help="TOML config file")
    p_cb.add_argument("--crossover", type=float, required=True)
    p_cb.add_argument("--out", default=None)
    p_cb.set_defaults(func=cmd_codebook)

    p_render = sub.add_parser("render", help="render result CSVs as SVG")
    p_render.add_argument("result_dir")
    p_render.add_argument("--limit", type=float, default=0.3,
                          help="exposure contour threshold, mW/cm^2")
    p_render.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
