"""Command-line front end tying the analysis pipeline together.

Subcommands: synth, identify, sweep, select, error, density, render.
Exit codes: 0 success, 2 usage error, 3 input validation, 4 computation
error. Every run logs the configuration it resolved to standard error, and
every subcommand is a pure function of its inputs, flags, and seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import io
from .density import evaluate_density
from .errors import ComputationError, ValidationError
from .model import CameraDataset, RapConfig
from .quadtree import hair_error, identify_hair
from .render import render_svg
from .resampling import run_sweep, select_parameters
from .synth import generate_camera


def _log_config(command: str, snapshot: dict) -> None:
    print(f"[hairkit {command}] config: {json.dumps(snapshot, sort_keys=True)}",
          file=sys.stderr)


def _resolve_image_ids(dataset: CameraDataset, value: str) -> list[str]:
    """Interpret an --images argument: 'all', a count, or comma-joined ids."""
    ids = dataset.image_ids()
    if value == "all":
        return list(ids)
    if "," in value:
        requested = [s for s in value.split(",") if s]
    elif value in ids:
        requested = [value]
    else:
        try:
            count = int(value)
        except ValueError:
            requested = [value]
        else:
            if count < 1:
                raise ValidationError("image count must be at least 1")
            if count > len(ids):
                raise ValidationError(
                    f"requested {count} images but dataset has {len(ids)}")
            return ids[:count]
    known = set(ids)
    missing = [r for r in requested if r not in known]
    if missing:
        raise ValidationError(f"image ids not in dataset: {missing}")
    return requested


def _workers_from_env() -> int:
    raw = os.environ.get("HAIR_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValidationError(f"HAIR_THREADS must be an integer, got {raw!r}")
    if workers < 1:
        raise ValidationError("HAIR_THREADS must be at least 1")
    return workers


def cmd_synth(args) -> int:
    spec = io.load_synth_spec(args.spec)
    _log_config("synth", {"spec": str(args.spec), "images": args.images,
                          "seed": spec.seed, "out": str(args.out)})
    dataset = generate_camera(spec, args.images, camera_id=args.camera_id)
    io.save_dataset(dataset, args.out)
    print(f"wrote {args.out}: {len(dataset.images)} images, "
          f"{sum(len(i.ground_truth) for i in dataset.images)} ground-truth boxes")
    return 0


def cmd_identify(args) -> int:
    dataset = io.load_dataset(args.dataset)
    image_ids = _resolve_image_ids(dataset, args.images)
    cfg = RapConfig(a0=args.a0, zero_recall_mode=args.convention,
                    empty_region_policy=args.empty_policy)
    _log_config("identify", {
        "dataset": str(args.dataset), "images": len(image_ids), "a0": args.a0,
        "max_depth": args.max_depth, "convention": args.convention,
        "empty_policy": args.empty_policy,
    })
    hair = identify_hair(dataset, image_ids, cfg, args.max_depth)
    io.save_hair(hair, args.out)
    coverage = hair.covered_area() / dataset.extent.area
    print(f"wrote {args.out}: {len(hair.leaves)} leaves, "
          f"{coverage:.1%} of the extent")
    return 0


def cmd_sweep(args) -> int:
    dataset = io.load_dataset(args.dataset)
    config = io.load_sweep_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    workers = _workers_from_env()
    _log_config("sweep", {
        "dataset": str(args.dataset), "n_values": list(config.n_values),
        "d0_values": list(config.d0_values), "iterations": config.iterations,
        "holdout_size": config.holdout_size, "a0": config.a0,
        "seed": config.seed, "workers": workers,
    })
    grid = run_sweep(dataset, config, workers=workers)
    io.save_sweep(grid, args.out)
    print("n\td0\trmse")
    for n, d0, value in grid.rows():
        print(f"{n}\t{d0}\t{value!r}")
    return 0


def cmd_select(args) -> int:
    grid = io.load_sweep(args.grid)
    _log_config("select", {"grid": str(args.grid), "delta_depth": args.delta_depth,
                           "delta_n": args.delta_n, "n_rule": args.n_rule})
    choice = select_parameters(grid, delta_depth=args.delta_depth,
                               delta_n=args.delta_n, n_rule=args.n_rule)
    print(f"d0_star={choice.d0_star}")
    print(f"n_star={choice.n_star}")
    return 0


def cmd_error(args) -> int:
    dataset = io.load_dataset(args.dataset)
    hair = io.load_hair(args.hair)
    image_ids = _resolve_image_ids(dataset, args.images)
    overlap = set(image_ids) & set(hair.identification_image_ids)
    if overlap:
        print(f"warning: {len(overlap)} evaluation image(s) were also used for "
              f"identification; treating this as a diagnostic run", file=sys.stderr)
    _log_config("error", {"dataset": str(args.dataset), "hair": str(args.hair),
                          "images": len(image_ids)})
    records = [dataset.image(i) for i in image_ids]
    result = hair_error(hair, records, hair.convention, require_disjoint=False)
    print(f"acc1={result.acc1!r}")
    print(f"acc2={result.acc2!r}")
    print(f"error={result.error!r}")
    return 0


def cmd_density(args) -> int:
    dataset = io.load_dataset(args.dataset)
    roads = io.load_roads(args.roads)
    hair = io.load_hair(args.hair) if args.hair else None
    image_ids = _resolve_image_ids(dataset, args.images)
    _log_config("density", {
        "dataset": str(args.dataset), "roads": str(args.roads),
        "hair": str(args.hair) if args.hair else None, "images": len(image_ids),
    })
    report = evaluate_density(dataset, image_ids, roads, hair)
    io.save_density_report(report, args.out)
    for scope in sorted(report.rmse_by_scope):
        print(f"rmse[{scope}]={report.rmse_by_scope[scope]!r} "
              f"({report.unit}, road length {report.road_length_by_scope[scope]!r})")
    return 0


def cmd_render(args) -> int:
    dataset = io.load_dataset(args.dataset)
    hair = io.load_hair(args.hair) if args.hair else None
    roads = io.load_roads(args.roads) if args.roads else None
    _log_config("render", {"dataset": str(args.dataset), "image": args.image,
                           "hair": str(args.hair) if args.hair else None,
                           "roads": str(args.roads) if args.roads else None})
    svg = render_svg(dataset, args.image, hair=hair, roads=roads,
                     background=args.background)
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hairkit",
        description="Identify high-accuracy regions in fixed-camera detection "
                    "data and use them for traffic-density estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic camera dataset")
    p.add_argument("--spec", required=True, help="synthetic-camera spec file")
    p.add_argument("--images", required=True, type=int, help="number of images")
    p.add_argument("--camera-id", default="synth")
    p.add_argument("--out", required=True, help="dataset file to write")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("identify", help="build the high-accuracy region set")
    p.add_argument("--dataset", required=True)
    p.add_argument("--images", required=True,
                   help="'all', a count (first K), or comma-joined image ids")
    p.add_argument("--a0", type=float, default=0.75,
                   help="acceptance threshold (default 0.75)")
    p.add_argument("--max-depth", required=True, type=int,
                   help="deepest quadtree level")
    p.add_argument("--convention", choices=("counted", "zeroed"), default="counted")
    p.add_argument("--empty-policy", choices=("include", "exclude"), default="exclude")
    p.add_argument("--out", required=True, help="region-set file to write")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("sweep", help="resampling sweep over (N, d0)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config", required=True, help="sweep configuration file")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="grid file to write")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("select", help="pick converged (d0*, N*) from a grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--delta-depth", type=float, default=0.01)
    p.add_argument("--delta-n", type=float, default=0.001)
    p.add_argument("--n-rule", choices=("at_n", "from_n"), default="at_n")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("error", help="accuracy lost by the region restriction")
    p.add_argument("--dataset", required=True)
    p.add_argument("--hair", required=True)
    p.add_argument("--images", required=True, help="holdout image selection")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("density", help="observed vs predicted traffic density")
    p.add_argument("--dataset", required=True)
    p.add_argument("--roads", required=True)
    p.add_argument("--hair", default=None)
    p.add_argument("--images", required=True)
    p.add_argument("--out", required=True, help="report file to write")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("render", help="SVG overlay of one image")
    p.add_argument("--dataset", required=True)
    p.add_argument("--hair", default=None)
    p.add_argument("--roads", default=None)
    p.add_argument("--image", required=True, help="image id to draw")
    p.add_argument("--background", default=None,
                   help="optional href to a camera frame for the backdrop")
    p.add_argument("--out", required=True, help="SVG file to write")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())
