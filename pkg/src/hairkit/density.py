"""Traffic-density estimation over the full extent and the accepted regions.

Density is vehicles per unit road length within a scope. Road lengths come
from clipping the road polylines to the scope rectangles, optionally mapped
through a ground-control-point homography so the result is in world units.
Vehicle membership in the accepted-region scope uses the same
majority-overlap rule as the error measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .geometry import Polyline, clip_polyline_length, estimate_homography
from .model import CameraDataset, Rect
from .quadtree import Hair, box_in_hair
from .resampling import rmse

FULL_SCOPE = "full_extent"
HAIR_SCOPE = "hair"


@dataclass(frozen=True)
class RoadSet:
    """Road polylines for one camera, with optional georeferencing points.

    When ``gcps`` (pixel, world) pairs are present, lengths are measured in
    world units through the fitted homography; otherwise in pixels.
    ``unit_scale`` multiplies measured lengths into the reporting unit
    (e.g. 1/5280 to report miles from feet).
    """

    roads: tuple[Polyline, ...]
    gcps: tuple[tuple[tuple[float, float], tuple[float, float]], ...] | None = None
    unit: str = "px"
    unit_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "roads", tuple(self.roads))
        if self.gcps is not None:
            gcps = tuple((tuple(map(float, p)), tuple(map(float, w)))
                         for p, w in self.gcps)
            object.__setattr__(self, "gcps", gcps)
            if len(gcps) < 4:
                raise ValidationError("georeferencing needs at least 4 control points")
        if not self.roads:
            raise ValidationError("road set must contain at least one road")
        if self.unit_scale <= 0:
            raise ValidationError("unit_scale must be positive")


@dataclass(frozen=True)
class DensityRow:
    """Observed vs predicted density for one image in one scope."""

    image_id: str
    scope: str
    gt_count: int
    det_count: int
    observed: float
    predicted: float
    error: float  # predicted - observed


@dataclass(frozen=True)
class DensityReport:
    """Per-image density rows plus per-scope RMSE and the lengths used."""

    rows: tuple[DensityRow, ...]
    rmse_by_scope: dict
    road_length_by_scope: dict
    unit: str

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))


def region_road_length(roads: RoadSet, scope: Sequence[Rect]) -> float:
    """Total road length inside the union of interior-disjoint scope rects."""
    homography = None
    if roads.gcps is not None:
        homography, _ = estimate_homography(roads.gcps, unit=roads.unit)
    total = 0.0
    for road in roads.roads:
        for rect in scope:
            total += clip_polyline_length(road, rect, homography)
    return total * roads.unit_scale


def estimate_density(vehicle_count: int, road_length: float) -> float:
    """Vehicles per unit road length."""
    if road_length <= 0:
        raise ValidationError("no road in scope")
    return vehicle_count / road_length


def evaluate_density(dataset: CameraDataset, eval_image_ids: Sequence[str],
                     roads: RoadSet, hair: Hair | None = None) -> DensityReport:
    """Predicted-vs-observed density per image and per scope.

    Observed density counts ground-truth boxes in the scope; predicted
    counts detections in the scope; both share the scope's road length.
    The full extent is always reported; the accepted-region scope is added
    when ``hair`` is given.
    """
    ids = list(eval_image_ids)
    if not ids:
        raise ValidationError("no evaluation images given")
    try:
        records = [dataset.image(i) for i in ids]
    except KeyError as exc:
        raise ValidationError(f"image id not in dataset: {exc.args[0]}") from None

    scopes: list[tuple[str, object]] = [(FULL_SCOPE, None)]
    if hair is not None:
        scopes.append((HAIR_SCOPE, hair))

    lengths = {}
    for name, scope_hair in scopes:
        rects = [dataset.extent] if scope_hair is None else scope_hair.leaf_rects()
        length = region_road_length(roads, rects)
        if length <= 0:
            raise ValidationError(f"no road length in scope '{name}'")
        lengths[name] = length

    rows = []
    for record in records:
        for name, scope_hair in scopes:
            if scope_hair is None:
                gt_count = len(record.ground_truth)
                det_count = len(record.detections)
            else:
                gt_count = sum(1 for b in record.ground_truth if box_in_hair(b, scope_hair))
                det_count = sum(1 for b in record.detections if box_in_hair(b, scope_hair))
            observed = estimate_density(gt_count, lengths[name])
            predicted = estimate_density(det_count, lengths[name])
            rows.append(DensityRow(record.image_id, name, gt_count, det_count,
                                   observed, predicted, predicted - observed))

    rmse_by_scope = {
        name: rmse([row.error for row in rows if row.scope == name])
        for name, _ in scopes
    }
    return DensityReport(
        rows=tuple(rows),
        rmse_by_scope=rmse_by_scope,
        road_length_by_scope=lengths,
        unit=f"vehicles per {roads.unit}",
    )
