"""Per-region detection evaluation.

The pipeline for one region is: assign boxes to regions by largest overlap,
match detections to ground truth per image, pool the outcomes across images
into a confidence-ranked list, and reduce that list to the regional average
precision (RAP), an interpolated average-precision score.

Every tie (score, IoU, overlap area) is broken deterministically, so
results are reproducible bit for bit regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .geometry import intersection_area, iou
from .model import BBox, RapConfig, Rect


@dataclass(frozen=True)
class DetectionOutcome:
    """One detection's matching result within a (region, image) pair."""

    det_index: int  # index into the detection list handed to match_image
    score: float
    is_tp: bool
    gt_index: int | None = None  # ground-truth box consumed, when is_tp


@dataclass(frozen=True)
class ImageMatch:
    """All detection outcomes for one image plus its ground-truth count."""

    outcomes: tuple[DetectionOutcome, ...]
    n_gt: int

    @property
    def tp(self) -> int:
        return sum(1 for o in self.outcomes if o.is_tp)

    @property
    def fp(self) -> int:
        return len(self.outcomes) - self.tp

    @property
    def fn(self) -> int:
        return self.n_gt - self.tp


@dataclass(frozen=True)
class RankedOutcomes:
    """Confidence-sorted (score, is_tp) pairs pooled over a region's images."""

    outcomes: tuple[tuple[float, bool], ...]
    n_gt: int

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(tuple(o) for o in self.outcomes))
        if self.n_gt < 0:
            raise ValueError("n_gt must be non-negative")
        scores = [score for score, _ in self.outcomes]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("outcome scores must be non-increasing")
        if sum(1 for _, is_tp in self.outcomes if is_tp) > self.n_gt:
            raise ValueError("true positives cannot exceed ground-truth count")


def assign_to_regions(boxes: Sequence, regions: Sequence[Rect]) -> list[int]:
    """Region index of maximal overlap for each box.

    Ties go to the lowest region index, i.e. NW before NE before SW before
    SE when the regions are the four quadrants in canonical order. Every
    box must overlap at least one region with positive area.
    """
    if not regions:
        raise ValueError("no regions to assign to")
    assignment = []
    for box in boxes:
        best_idx = -1
        best_area = 0.0
        for idx, region in enumerate(regions):
            area = intersection_area(box, region)
            if area > best_area:
                best_area = area
                best_idx = idx
        if best_idx < 0:
            raise ValueError(f"box at ({box.x}, {box.y}) overlaps no region")
        assignment.append(best_idx)
    return assignment


def match_image(gt: Sequence[BBox], det: Sequence[BBox], cfg: RapConfig) -> ImageMatch:
    """Greedy one-to-one matching of detections against ground truth.

    Detections are processed by descending score (input index breaks ties).
    Each is matched to the still-unmatched ground-truth box of maximal IoU
    (lowest index breaks ties); it is a true positive iff that IoU strictly
    exceeds the threshold, in which case the ground-truth box is consumed.
    """
    for box in det:
        if box.score is None:
            raise ValueError("detection without a score (dataset not validated?)")
    order = sorted(range(len(det)), key=lambda i: (-det[i].score, i))
    taken = [False] * len(gt)
    outcomes = []
    for i in order:
        best_j = -1
        best_iou = -1.0
        for j, g in enumerate(gt):
            if taken[j]:
                continue
            value = iou(det[i], g)
            if value > best_iou:
                best_iou = value
                best_j = j
        is_tp = best_j >= 0 and best_iou > cfg.iou_threshold
        if is_tp:
            taken[best_j] = True
        outcomes.append(DetectionOutcome(i, det[i].score, is_tp,
                                         best_j if is_tp else None))
    return ImageMatch(tuple(outcomes), len(gt))


def compile_ranked(per_image: Sequence[tuple[str, ImageMatch]]) -> RankedOutcomes:
    """Pool per-image outcomes from one region into a single ranked list.

    Sort order is (score descending, image_id ascending, detection index
    ascending); the ground-truth count is summed over the images.
    """
    entries = []
    for image_id, match in per_image:
        for o in match.outcomes:
            entries.append((o.score, image_id, o.det_index, o.is_tp))
    entries.sort(key=lambda e: (-e[0], e[1], e[2]))
    n_gt = sum(match.n_gt for _, match in per_image)
    return RankedOutcomes(tuple((score, is_tp) for score, _, _, is_tp in entries), n_gt)


def rap(ranked: RankedOutcomes, cfg: RapConfig) -> float | None:
    """Regional average precision of a ranked outcome list.

    For each recall level r, the interpolated precision is the maximum
    running precision over positions whose running recall reaches r (0 when
    no position does); RAP is the mean over the configured levels. In
    ``zeroed`` mode the level-0 term is forced to zero.

    Returns None (undefined) when the region holds neither ground truth nor
    detections; 0.0 when there are detections but no ground truth.
    """
    if ranked.n_gt == 0:
        return 0.0 if ranked.outcomes else None
    precisions = []
    recalls = []
    tp = 0
    for pos, (_, is_tp) in enumerate(ranked.outcomes, start=1):
        if is_tp:
            tp += 1
        precisions.append(tp / pos)
        recalls.append(tp / ranked.n_gt)
    levels = cfg.recall_levels
    total = 0.0
    for level_idx, level in enumerate(levels):
        if level_idx == 0 and cfg.zero_recall_mode == "zeroed":
            continue
        best = 0.0
        for p, r in zip(precisions, recalls):
            if r >= level and p > best:
                best = p
        total += best
    return total / len(levels)


def precision_recall(ranked: RankedOutcomes) -> tuple[float | None, float | None]:
    """Overall (precision, recall) of the full ranked list.

    Precision is None when there are no detections; recall is None when
    there is no ground truth.
    """
    n_det = len(ranked.outcomes)
    tp = sum(1 for _, is_tp in ranked.outcomes if is_tp)
    precision = tp / n_det if n_det else None
    recall = tp / ranked.n_gt if ranked.n_gt else None
    return precision, recall
