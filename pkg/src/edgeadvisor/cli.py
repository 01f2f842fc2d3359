"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 calibration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .advisor import DEFAULT_THRESHOLDS, Thresholds, recommend
from .archmodel import ArchitectureSpec, Grid, generate_grid
from .energymodel import (
    ArchFeatures,
    CalibrationError,
    DegenerateInput,
    fit_affine,
    load_calibration,
)
from .placement import Residency
from .spectro import (
    SpectrogramParams,
    TimeSeriesWindow,
    UnknownResolution,
    bicubic_resize,
    read_timeseries_csv,
    resolution_to_input_width,
    stft_spectrogram,
    write_grid_csv,
    write_pgm,
)
from .sweep import UNITS, describe, evaluate, rows_to_csv, rows_to_json, sweep

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CALIBRATION = 3

log = logging.getLogger("edgeadvisor")


class InputError(Exception):
    pass


def _load_arch(text: str) -> ArchitectureSpec:
    source = text
    if not text.lstrip().startswith("{"):
        try:
            with open(text) as fh:
                source = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read architecture file {text}: {exc}") from None
    try:
        return ArchitectureSpec.from_json(source)
    except (ValueError, TypeError) as exc:
        raise InputError(f"malformed architecture JSON: {exc}") from None


def _load_thresholds(path) -> Thresholds:
    if path is None:
        return DEFAULT_THRESHOLDS
    try:
        return Thresholds.from_file(path)
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"bad thresholds file {path}: {exc}") from None


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from None


def cmd_analyze(args) -> int:
    spec = _load_arch(args.arch)
    platforms = load_calibration(args.calibration)
    row = evaluate(spec, platforms=platforms, thresholds=_load_thresholds(args.thresholds))
    if args.format == "json":
        _write(json.dumps(row.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
    else:
        _write(describe(row) + "\n", args.out)
    return EXIT_OK


def cmd_recommend(args) -> int:
    thresholds = _load_thresholds(args.thresholds)
    platforms = load_calibration(args.calibration)
    if args.arch is not None:
        row = evaluate(_load_arch(args.arch), platforms=platforms, thresholds=thresholds)
        rec = row.recommendation
    else:
        if args.size_mb is None or args.max_width is None:
            raise InputError("give an architecture or both --size-mb and --max-width")
        if args.size_mb < 0 or args.max_width < 1:
            raise InputError("--size-mb must be >= 0 and --max-width >= 1")
        f = ArchFeatures(
            size_mb=args.size_mb,
            input_width=args.max_width,
            max_width=args.max_width,
            first_hidden_width=args.max_width,
            depth=0,
            residency=Residency(args.residency),
            max_hidden_width=args.max_width,
        )
        rec = recommend(f, thresholds, platforms)
    if args.format == "json":
        _write(json.dumps(rec.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
    else:
        text = f"{rec.platform.value} [{rec.rule_fired.value}]\n{rec.rationale}\n"
        text += "".join(f"warning: {w}\n" for w in rec.warnings)
        _write(text, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = Grid(args.grid.lower())
    except ValueError:
        raise InputError(f"unknown grid {args.grid!r}; choose set1, set2 or set3") from None
    platforms = load_calibration(args.calibration)
    thresholds = _load_thresholds(args.thresholds)
    rows = sweep(generate_grid(grid), platforms=platforms, thresholds=thresholds)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
    _write(text, args.out)
    if args.out not in (None, "-"):
        meta = {
            "grid": grid.value,
            "rows": len(rows),
            "format": args.format,
            "units": UNITS,
            "calibration": args.calibration or os.environ.get("EDGE_ADVISOR_CALIBRATION") or "defaults",
            "thresholds": thresholds.to_dict(),
            "version": __version__,
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        _write(json.dumps(meta, indent=2) + "\n", args.out + ".meta.json")
        log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    try:
        table_width = resolution_to_input_width(args.resolution)
    except UnknownResolution as exc:
        raise InputError(str(exc)) from None
    try:
        _, samples = read_timeseries_csv(args.csv)
    except OSError as exc:
        raise InputError(f"cannot read {args.csv}: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not 0 <= args.axis < samples.shape[0]:
        raise InputError(f"axis {args.axis} out of range; file has {samples.shape[0]} axes")
    try:
        params = SpectrogramParams(args.window, args.window_length, args.hop, not args.no_normalize)
        window = TimeSeriesWindow.from_samples(samples, args.sample_rate)
        spec = stft_spectrogram(window, args.axis, params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    scaled = bicubic_resize(spec, args.resolution)

    fmt = args.format or ("pgm" if str(args.out).endswith(".pgm") else "csv")
    try:
        if fmt == "pgm":
            write_pgm(args.out, scaled.grid)
        else:
            write_grid_csv(args.out, scaled.grid)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None

    rows, cols = scaled.shape
    print(f"grid {rows}x{cols} at {args.resolution}% (full resolution {spec.shape[0]}x{spec.shape[1]})")
    print(f"flattened width per axis: {scaled.pixels}")
    print(f"flattened width for {window.n_axes} axes: {scaled.pixels * window.n_axes}")
    print(f"tabulated input width at {args.resolution}%: {table_width}")
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        with open(args.points, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise InputError(f"cannot read {args.points}: {exc}") from None
    points = []
    for i, r in enumerate(rows):
        try:
            points.append((float(r[0]), float(r[1])))
        except (ValueError, IndexError):
            if i == 0:
                continue  # header
            raise InputError(f"{args.points}: line {i + 1} is not an x,y pair") from None
    try:
        result = fit_affine(points)
    except DegenerateInput as exc:
        raise InputError(f"{args.points}: {exc}") from None
    _write(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--calibration", help="calibration JSON overriding the shipped platforms")
    common.add_argument("--thresholds", help="JSON file with decision-chart thresholds")
    common.add_argument("--out", help="output path (default stdout)")

    parser = argparse.ArgumentParser(
        prog="edge-advisor",
        description="Edge TPU / Cortex-A53 design-space exploration for feed-forward networks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="evaluate one architecture")
    p.add_argument("arch", help="architecture JSON literal or path to a JSON file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("recommend", parents=[common], help="run the decision chart")
    p.add_argument("arch", nargs="?", help="architecture JSON literal or path")
    p.add_argument("--size-mb", type=float)
    p.add_argument("--max-width", type=int)
    p.add_argument("--residency", choices=[r.value for r in Residency], default="ON_CHIP")
    p.add_argument("--format", choices=("text", "json"), default="json")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("sweep", parents=[common], help="evaluate one of the experiment grids")
    p.add_argument("grid", help="set1, set2 or set3")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrogram", parents=[common], help="spectrogram of one CSV axis")
    p.add_argument("csv", help="CSV with a timestamp column followed by one column per axis")
    p.add_argument("--axis", type=int, default=0)
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--window", choices=("hann", "hamming", "rectangular"), default="hann")
    p.add_argument("--window-length", type=int, default=64)
    p.add_argument("--hop", type=int, default=12)
    p.add_argument("--sample-rate", type=float, default=50.0)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--format", choices=("csv", "pgm"))
    p.set_defaults(func=cmd_spectrogram)

    p = sub.add_parser("fit", parents=[common], help="least-squares line through x,y points")
    p.add_argument("points", help="CSV of x,y pairs")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "spectrogram" and not args.out:
        parser.error("spectrogram needs --out")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CalibrationError as exc:
        print(f"calibration error: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION


if __name__ == "__main__":
    sys.exit(main())
