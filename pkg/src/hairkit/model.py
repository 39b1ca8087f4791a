"""Shared domain types: boxes, images, datasets, and metric configuration.

All types are immutable after construction and safe to share across
threads. Box constructors are deliberately permissive; invariants are
checked by :func:`validate_dataset` so a whole file can be reported on in
one pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import DatasetValidationError

ZERO_RECALL_MODES = ("counted", "zeroed")
EMPTY_REGION_POLICIES = ("include", "exclude")

#: Eleven equally spaced recall levels from 0 to 1.
DEFAULT_RECALL_LEVELS = tuple(k / 10 for k in range(11))


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in pixel space; origin top-left, y grows downward.

    Detections carry a confidence ``score`` in [0, 1]; ground-truth boxes
    leave it None. Coordinates are doubles so that homography-derived
    geometry composes without quantization.
    """

    x: float
    y: float
    w: float
    h: float
    score: float | None = None

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Rect:
    """Rectangle with non-negative extent.

    Empty rects (w == 0 or h == 0) are legal as clipping results but never
    as quadtree nodes.
    """

    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class ImageRecord:
    """One annotated image: ground-truth boxes plus detector output."""

    image_id: str
    ground_truth: tuple[BBox, ...]
    detections: tuple[BBox, ...]

    def __post_init__(self):
        object.__setattr__(self, "ground_truth", tuple(self.ground_truth))
        object.__setattr__(self, "detections", tuple(self.detections))


@dataclass(frozen=True)
class CameraDataset:
    """All annotated images from one fixed camera with a shared pixel extent."""

    camera_id: str
    width: int
    height: int
    images: tuple[ImageRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))

    @property
    def extent(self) -> Rect:
        return Rect(0.0, 0.0, float(self.width), float(self.height))

    def image_ids(self) -> list[str]:
        return [img.image_id for img in self.images]

    def image(self, image_id: str) -> ImageRecord:
        for img in self.images:
            if img.image_id == image_id:
                return img
        raise KeyError(image_id)


@dataclass(frozen=True)
class RapConfig:
    """Configuration for the regional average-precision metric.

    ``a0`` is the acceptance threshold a region must strictly exceed to be
    certified high-accuracy. ``zero_recall_mode`` selects how the recall
    level 0 is interpolated: ``counted`` uses the standard max-precision
    interpolation, ``zeroed`` forces the level-0 contribution to zero.
    ``empty_region_policy`` decides whether regions with no evidence at all
    (no ground truth and no detections) are certified (``include``) or
    dropped (``exclude``).
    """

    recall_levels: tuple[float, ...] = DEFAULT_RECALL_LEVELS
    a0: float = 0.75
    iou_threshold: float = 0.5
    zero_recall_mode: str = "counted"
    empty_region_policy: str = "exclude"

    def __post_init__(self):
        object.__setattr__(self, "recall_levels", tuple(self.recall_levels))
        levels = self.recall_levels
        if len(levels) < 2 or levels[0] != 0.0 or levels[-1] != 1.0:
            raise ValueError("recall_levels must start at 0 and end at 1")
        if any(a > b for a, b in zip(levels, levels[1:])):
            raise ValueError("recall_levels must be non-decreasing")
        if not 0.0 < self.iou_threshold < 1.0:
            raise ValueError("iou_threshold must lie strictly between 0 and 1")
        if not 0.0 <= self.a0 < 1.0:
            raise ValueError("a0 must lie in [0, 1)")
        if self.zero_recall_mode not in ZERO_RECALL_MODES:
            raise ValueError(f"unknown zero_recall_mode {self.zero_recall_mode!r}")
        if self.empty_region_policy not in EMPTY_REGION_POLICIES:
            raise ValueError(f"unknown empty_region_policy {self.empty_region_policy!r}")


@dataclass(frozen=True)
class Violation:
    """One invariant breach, pinpointing (image_id, box index, rule)."""

    image_id: str | None
    kind: str | None  # "gt" | "det" | None for image/dataset level rules
    box_index: int | None
    rule: str
    detail: str

    def __str__(self) -> str:
        where = self.image_id if self.image_id is not None else "<dataset>"
        if self.box_index is not None:
            where += f"/{self.kind}[{self.box_index}]"
        return f"{where}: {self.rule} ({self.detail})"


def _extent_overlap(box: BBox, width: float, height: float) -> float:
    # Local twin of geometry.intersection_area; kept here to avoid an
    # import cycle between the type module and the geometry module.
    w = min(box.x + box.w, width) - max(box.x, 0.0)
    h = min(box.y + box.h, height) - max(box.y, 0.0)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def collect_violations(dataset: CameraDataset) -> list[Violation]:
    """Check every invariant and return one entry per breach (empty if valid)."""
    violations: list[Violation] = []
    if dataset.width <= 0 or dataset.height <= 0:
        violations.append(
            Violation(None, None, None, "bad extent",
                      f"width={dataset.width} height={dataset.height}")
        )
        return violations

    seen: set[str] = set()
    for record in dataset.images:
        if record.image_id in seen:
            violations.append(
                Violation(record.image_id, None, None, "duplicate image_id",
                          "image_id must be unique within a dataset")
            )
        seen.add(record.image_id)
        for kind, boxes in (("gt", record.ground_truth), ("det", record.detections)):
            for i, box in enumerate(boxes):
                if box.w <= 0 or box.h <= 0:
                    violations.append(
                        Violation(record.image_id, kind, i, "degenerate box",
                                  f"w={box.w} h={box.h}")
                    )
                    continue
                if _extent_overlap(box, dataset.width, dataset.height) <= 0:
                    violations.append(
                        Violation(record.image_id, kind, i, "outside extent",
                                  f"box at ({box.x}, {box.y}) has zero overlap "
                                  f"with {dataset.width}x{dataset.height}")
                    )
                if kind == "det":
                    if box.score is None:
                        violations.append(
                            Violation(record.image_id, kind, i, "missing score",
                                      "detections must carry a confidence score")
                        )
                    elif not 0.0 <= box.score <= 1.0:
                        violations.append(
                            Violation(record.image_id, kind, i, "score out of range",
                                      f"score={box.score}")
                        )
                elif box.score is not None:
                    violations.append(
                        Violation(record.image_id, kind, i, "unexpected score",
                                  "ground-truth boxes must not carry a score")
                    )
    return violations


def validate_dataset(dataset: CameraDataset) -> CameraDataset:
    """Return ``dataset`` unchanged if valid, else raise with every violation."""
    violations = collect_violations(dataset)
    if violations:
        raise DatasetValidationError(violations)
    return dataset


def make_dataset(camera_id: str, width: int, height: int,
                 images: Iterable[ImageRecord]) -> CameraDataset:
    """Build and validate a dataset in one step."""
    return validate_dataset(CameraDataset(camera_id, width, height, tuple(images)))
