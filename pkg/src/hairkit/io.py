"""Interchange files: datasets, roads, region sets, sweep grids, and reports.

Everything is human-readable structured text (JSON, or TSV for the
write-only density report) with a ``format_version`` / ``kind`` envelope.
Readers reject unknown versions and kinds instead of guessing, and the
region-set loader re-derives each leaf rectangle from its quadrant path so
tampered files are caught. Writers are deterministic: the same value always
produces the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .density import DensityReport, RoadSet
from .errors import FormatError
from .geometry import QUADRANT_NAMES, Polyline, split_quadrants
from .model import BBox, CameraDataset, ImageRecord, Rect, RapConfig, validate_dataset
from .quadtree import Hair, QuadrantNode
from .resampling import SweepConfig, SweepGrid
from .synth import Curve, SynthSpec

FORMAT_VERSION = "1"


def _read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(obj, dict):
        raise FormatError(f"{path}: top level must be an object")
    return obj


def _write_json(obj: dict, path) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _check_envelope(obj: dict, kind: str, where: str) -> None:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"{where}: unsupported format_version {version!r}")
    if obj.get("kind") != kind:
        raise FormatError(f"{where}: expected kind {kind!r}, found {obj.get('kind')!r}")


def _get(obj, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f'{where}: missing "{key}"')
    return obj[key]


def _num(obj, key: str, where: str) -> float:
    value = _get(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f'{where}: "{key}" must be a number')
    return float(value)


def _int(obj, key: str, where: str) -> int:
    value = _get(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f'{where}: "{key}" must be an integer')
    return value


def _str(obj, key: str, where: str) -> str:
    value = _get(obj, key, where)
    if not isinstance(value, str):
        raise FormatError(f'{where}: "{key}" must be a string')
    return value


def _list(obj, key: str, where: str) -> list:
    value = _get(obj, key, where)
    if not isinstance(value, list):
        raise FormatError(f'{where}: "{key}" must be a list')
    return value


# ---------------------------------------------------------------------------
# datasets

def _box_from_json(obj, where: str, with_score: bool) -> BBox:
    box = BBox(
        x=_num(obj, "x", where),
        y=_num(obj, "y", where),
        w=_num(obj, "w", where),
        h=_num(obj, "h", where),
        score=_num(obj, "score", where) if with_score or "score" in obj else None,
    )
    return box


def _box_to_json(box: BBox) -> dict:
    obj = {"x": box.x, "y": box.y, "w": box.w, "h": box.h}
    if box.score is not None:
        obj["score"] = box.score
    return obj


def load_dataset(path) -> CameraDataset:
    """Read and fully validate a dataset file."""
    obj = _read_json(path)
    _check_envelope(obj, "dataset", str(path))
    images = []
    for i, img in enumerate(_list(obj, "images", str(path))):
        where = f"{path}: images[{i}]"
        gt = tuple(_box_from_json(b, f"{where}.ground_truth[{j}]", with_score=False)
                   for j, b in enumerate(_list(img, "ground_truth", where)))
        det = tuple(_box_from_json(b, f"{where}.detections[{j}]", with_score=True)
                    for j, b in enumerate(_list(img, "detections", where)))
        images.append(ImageRecord(_str(img, "image_id", where), gt, det))
    dataset = CameraDataset(
        camera_id=_str(obj, "camera_id", str(path)),
        width=_int(obj, "width", str(path)),
        height=_int(obj, "height", str(path)),
        images=tuple(images),
    )
    return validate_dataset(dataset)


def save_dataset(dataset: CameraDataset, path) -> None:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "dataset",
        "camera_id": dataset.camera_id,
        "width": dataset.width,
        "height": dataset.height,
        "images": [
            {
                "image_id": img.image_id,
                "ground_truth": [_box_to_json(b) for b in img.ground_truth],
                "detections": [_box_to_json(b) for b in img.detections],
            }
            for img in dataset.images
        ],
    }
    _write_json(obj, path)


def dataset_from_coco(coco: dict, detections: list | None = None,
                      camera_id: str = "coco") -> CameraDataset:
    """Convert COCO-style annotations ([x, y, w, h], top-left origin).

    ``coco`` is a parsed annotation object with ``images`` and
    ``annotations``; ``detections`` is an optional results list of
    ``{"image_id", "bbox", "score"}``. All images must share one extent
    (a fixed camera).
    """
    images = _list(coco, "images", "coco")
    if not images:
        raise FormatError("coco: no images")
    width = _int(images[0], "width", "coco.images[0]")
    height = _int(images[0], "height", "coco.images[0]")
    names: dict[object, str] = {}
    for i, img in enumerate(images):
        where = f"coco.images[{i}]"
        if _int(img, "width", where) != width or _int(img, "height", where) != height:
            raise FormatError(f"{where}: extent differs from first image")
        img_id = _get(img, "id", where)
        names[img_id] = img.get("file_name", str(img_id))

    gt: dict[object, list[BBox]] = {key: [] for key in names}
    for i, ann in enumerate(_list(coco, "annotations", "coco")):
        where = f"coco.annotations[{i}]"
        img_id = _get(ann, "image_id", where)
        if img_id not in names:
            raise FormatError(f"{where}: unknown image_id {img_id!r}")
        x, y, w, h = _list(ann, "bbox", where)
        gt[img_id].append(BBox(float(x), float(y), float(w), float(h)))

    det: dict[object, list[BBox]] = {key: [] for key in names}
    for i, d in enumerate(detections or []):
        where = f"detections[{i}]"
        img_id = _get(d, "image_id", where)
        if img_id not in names:
            raise FormatError(f"{where}: unknown image_id {img_id!r}")
        x, y, w, h = _list(d, "bbox", where)
        det[img_id].append(BBox(float(x), float(y), float(w), float(h),
                                score=_num(d, "score", where)))

    records = tuple(
        ImageRecord(names[key], tuple(gt[key]), tuple(det[key])) for key in names
    )
    return validate_dataset(CameraDataset(camera_id, width, height, records))


# ---------------------------------------------------------------------------
# roads

def load_roads(path) -> RoadSet:
    obj = _read_json(path)
    _check_envelope(obj, "roads", str(path))
    roads = []
    for i, road in enumerate(_list(obj, "roads", str(path))):
        where = f"{path}: roads[{i}]"
        points = tuple((float(p[0]), float(p[1]))
                       for p in _list(road, "points", where))
        roads.append(Polyline(_str(road, "road_id", where), points))
    gcps = None
    if "gcps" in obj:
        gcps = tuple(
            (tuple(map(float, _list(g, "px", f"{path}: gcps[{i}]"))),
             tuple(map(float, _list(g, "world", f"{path}: gcps[{i}]"))))
            for i, g in enumerate(obj["gcps"])
        )
    return RoadSet(
        roads=tuple(roads),
        gcps=gcps,
        unit=_str(obj, "unit", str(path)),
        unit_scale=_num(obj, "unit_scale", str(path)),
    )


def save_roads(roads: RoadSet, path) -> None:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "roads",
        "unit": roads.unit,
        "unit_scale": roads.unit_scale,
        "roads": [
            {"road_id": r.road_id, "points": [[x, y] for x, y in r.vertices]}
            for r in roads.roads
        ],
    }
    if roads.gcps is not None:
        obj["gcps"] = [{"px": list(p), "world": list(w)} for p, w in roads.gcps]
    _write_json(obj, path)


# ---------------------------------------------------------------------------
# region sets

def _rap_config_to_json(cfg: RapConfig) -> dict:
    return {
        "recall_levels": list(cfg.recall_levels),
        "a0": cfg.a0,
        "iou_threshold": cfg.iou_threshold,
        "zero_recall_mode": cfg.zero_recall_mode,
        "empty_region_policy": cfg.empty_region_policy,
    }


def _rap_config_from_json(obj, where: str) -> RapConfig:
    try:
        return RapConfig(
            recall_levels=tuple(_list(obj, "recall_levels", where)),
            a0=_num(obj, "a0", where),
            iou_threshold=_num(obj, "iou_threshold", where),
            zero_recall_mode=_str(obj, "zero_recall_mode", where),
            empty_region_policy=_str(obj, "empty_region_policy", where),
        )
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def rect_for_path(width: int, height: int, tokens) -> Rect:
    """Rectangle reached by splitting the extent along a quadrant path."""
    rect = Rect(0.0, 0.0, float(width), float(height))
    for token in tokens:
        if token not in QUADRANT_NAMES:
            raise FormatError(f"invalid quadrant token {token!r}")
        rect = split_quadrants(rect)[QUADRANT_NAMES.index(token)]
    return rect


def load_hair(path) -> Hair:
    """Read a region-set file, verifying each leaf rect against its path."""
    obj = _read_json(path)
    _check_envelope(obj, "hair", str(path))
    width = _int(obj, "width", str(path))
    height = _int(obj, "height", str(path))
    max_depth = _int(obj, "max_depth", str(path))
    leaves = []
    for i, leaf in enumerate(_list(obj, "leaves", str(path))):
        where = f"{path}: leaves[{i}]"
        leaf_path = _str(leaf, "path", where)
        tokens = leaf_path.split(".") if leaf_path else []
        if len(tokens) > max_depth:
            raise FormatError(f"{where}: path {leaf_path!r} deeper than max_depth")
        rect_obj = _get(leaf, "rect", where)
        rect = Rect(_num(rect_obj, "x", where), _num(rect_obj, "y", where),
                    _num(rect_obj, "w", where), _num(rect_obj, "h", where))
        expected = rect_for_path(width, height, tokens)
        if rect != expected:
            raise FormatError(
                f"{where}: rect {rect} inconsistent with path {leaf_path!r} "
                f"(expected {expected})")
        rap_value = _get(leaf, "rap", where)
        if rap_value is not None and (
                isinstance(rap_value, bool) or not isinstance(rap_value, (int, float))):
            raise FormatError(f'{where}: "rap" must be a number or null')
        leaves.append(QuadrantNode(leaf_path, rect,
                                   None if rap_value is None else float(rap_value)))
    ids = _list(obj, "identification_image_ids", str(path))
    return Hair(
        camera_id=_str(obj, "camera_id", str(path)),
        width=width,
        height=height,
        a0=_num(obj, "a0", str(path)),
        max_depth=max_depth,
        convention=_rap_config_from_json(_get(obj, "convention", str(path)),
                                         f"{path}: convention"),
        identification_image_ids=tuple(ids),
        leaves=tuple(leaves),
    )


def save_hair(hair: Hair, path) -> None:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "hair",
        "camera_id": hair.camera_id,
        "width": hair.width,
        "height": hair.height,
        "a0": hair.a0,
        "max_depth": hair.max_depth,
        "convention": _rap_config_to_json(hair.convention),
        "identification_image_ids": list(hair.identification_image_ids),
        "leaves": [
            {
                "path": leaf.path,
                "rect": {"x": leaf.rect.x, "y": leaf.rect.y,
                         "w": leaf.rect.w, "h": leaf.rect.h},
                "rap": leaf.rap,
            }
            for leaf in hair.leaves
        ],
    }
    _write_json(obj, path)


# ---------------------------------------------------------------------------
# sweep grids and configs

def _sweep_config_to_json(config: SweepConfig) -> dict:
    return {
        "n_values": list(config.n_values),
        "d0_values": list(config.d0_values),
        "iterations": config.iterations,
        "holdout_size": config.holdout_size,
        "a0": config.a0,
        "seed": config.seed,
        "rap": _rap_config_to_json(config.rap),
    }


def _sweep_config_from_json(obj, where: str) -> SweepConfig:
    defaults = SweepConfig()
    rap = (_rap_config_from_json(obj["rap"], f"{where}.rap")
           if "rap" in obj else defaults.rap)
    return SweepConfig(
        n_values=tuple(obj.get("n_values", defaults.n_values)),
        d0_values=tuple(obj.get("d0_values", defaults.d0_values)),
        iterations=obj.get("iterations", defaults.iterations),
        holdout_size=obj.get("holdout_size", defaults.holdout_size),
        a0=obj.get("a0", defaults.a0),
        seed=obj.get("seed", defaults.seed),
        rap=rap,
    )


def load_sweep_config(path) -> SweepConfig:
    """Read a sweep configuration; absent fields fall back to defaults."""
    obj = _read_json(path)
    _check_envelope(obj, "sweep_config", str(path))
    return _sweep_config_from_json(obj, str(path))


def save_sweep_config(config: SweepConfig, path) -> None:
    obj = {"format_version": FORMAT_VERSION, "kind": "sweep_config"}
    obj.update(_sweep_config_to_json(config))
    _write_json(obj, path)


def load_sweep(path) -> SweepGrid:
    """Read a sweep grid, checking it covers its config exactly."""
    obj = _read_json(path)
    _check_envelope(obj, "sweep", str(path))
    config = _sweep_config_from_json(_get(obj, "config", str(path)), f"{path}: config")
    cells = {}
    errors = {}
    for i, cell in enumerate(_list(obj, "cells", str(path))):
        where = f"{path}: cells[{i}]"
        key = (_int(cell, "n", where), _int(cell, "d0", where))
        if key in cells:
            raise FormatError(f"{where}: duplicate cell {key}")
        cells[key] = _num(cell, "rmse", where)
        if "errors" in cell:
            errors[key] = tuple(float(e) for e in cell["errors"])
    expected = set(config.cells())
    if set(cells) != expected:
        missing = sorted(expected - set(cells))
        extra = sorted(set(cells) - expected)
        raise FormatError(
            f"{path}: grid does not match its config "
            f"(missing {missing}, unexpected {extra})")
    if errors and set(errors) != expected:
        raise FormatError(f"{path}: per-cell errors must cover every cell or none")
    return SweepGrid(cells=cells, seed=_int(obj, "seed", str(path)),
                     config=config, errors=errors or None)


def save_sweep(grid: SweepGrid, path) -> None:
    cells = []
    for n, d0 in sorted(grid.cells):
        cell = {"n": n, "d0": d0, "rmse": grid.cells[(n, d0)]}
        if grid.errors is not None:
            cell["errors"] = list(grid.errors[(n, d0)])
        cells.append(cell)
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "sweep",
        "seed": grid.seed,
        "config": _sweep_config_to_json(grid.config),
        "cells": cells,
    }
    _write_json(obj, path)


# ---------------------------------------------------------------------------
# synthetic-camera specs

def load_synth_spec(path) -> SynthSpec:
    obj = _read_json(path)
    _check_envelope(obj, "synth_spec", str(path))
    road_obj = _get(obj, "road", str(path))
    road = Polyline(
        _str(road_obj, "road_id", f"{path}: road"),
        tuple((float(p[0]), float(p[1]))
              for p in _list(road_obj, "points", f"{path}: road")),
    )
    return SynthSpec(
        width=_int(obj, "width", str(path)),
        height=_int(obj, "height", str(path)),
        road=road,
        vehicles_per_image=_num(obj, "vehicles_per_image", str(path)),
        size_near=_num(obj, "size_near", str(path)),
        size_far=_num(obj, "size_far", str(path)),
        detect_prob=Curve(tuple((float(x), float(y))
                                for x, y in _list(obj, "detect_prob", str(path)))),
        fp_rate=_num(obj, "fp_rate", str(path)),
        localization_jitter=_num(obj, "localization_jitter", str(path)),
        score_model=Curve(tuple((float(x), float(y))
                                for x, y in _list(obj, "score_model", str(path)))),
        score_noise=_num(obj, "score_noise", str(path)),
        seed=_int(obj, "seed", str(path)),
    )


def save_synth_spec(spec: SynthSpec, path) -> None:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "synth_spec",
        "width": spec.width,
        "height": spec.height,
        "road": {"road_id": spec.road.road_id,
                 "points": [[x, y] for x, y in spec.road.vertices]},
        "vehicles_per_image": spec.vehicles_per_image,
        "size_near": spec.size_near,
        "size_far": spec.size_far,
        "detect_prob": [[x, y] for x, y in spec.detect_prob.points],
        "fp_rate": spec.fp_rate,
        "localization_jitter": spec.localization_jitter,
        "score_model": [[x, y] for x, y in spec.score_model.points],
        "score_noise": spec.score_noise,
        "seed": spec.seed,
    }
    _write_json(obj, path)


# ---------------------------------------------------------------------------
# density reports (write-only tabular export)

DENSITY_COLUMNS = ("image_id", "scope", "observed", "predicted", "error")
DENSITY_SUMMARY_ID = "OVERALL_RMSE"


def format_density_report(report: DensityReport) -> str:
    """Tab-separated rows, one header, trailing per-scope RMSE summary rows."""
    lines = ["\t".join(DENSITY_COLUMNS)]
    for row in report.rows:
        lines.append("\t".join((
            row.image_id, row.scope,
            repr(row.observed), repr(row.predicted), repr(row.error),
        )))
    for scope in sorted(report.rmse_by_scope):
        lines.append("\t".join((
            DENSITY_SUMMARY_ID, scope, "", "", repr(report.rmse_by_scope[scope]),
        )))
    return "\n".join(lines) + "\n"


def save_density_report(report: DensityReport, path) -> None:
    Path(path).write_text(format_density_report(report), encoding="utf-8")
