"""Recursive identification of high-accuracy regions and their error measure.

A camera extent is split into quadrants recursively. A node whose regional
average precision strictly exceeds the threshold is accepted as a leaf of
the high-accuracy identification region (HAIR) and never split further;
nodes at the maximal depth are dropped. Box populations flow down the tree
hierarchically: once a box is assigned to a child (largest overlap, NW
before NE before SW before SE on ties), deeper levels only ever reassign it
among that child's own children.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .geometry import QUADRANT_NAMES, intersection_area, split_quadrants
from .model import BBox, CameraDataset, ImageRecord, RapConfig, Rect
from .region_eval import assign_to_regions, compile_ranked, match_image, rap


@dataclass(frozen=True)
class QuadrantNode:
    """A quadtree address: dotted path from the root ("" = root) plus its rect.

    ``rap`` is the node's regional average precision on the identification
    images, or None for a region with no evidence.
    """

    path: str
    rect: Rect
    rap: float | None

    @property
    def depth(self) -> int:
        return len(self.tokens())

    def tokens(self) -> tuple[str, ...]:
        return tuple(self.path.split(".")) if self.path else ()


@dataclass(frozen=True)
class Hair:
    """The accepted quadrants of one camera, with the settings that built them."""

    camera_id: str
    width: int
    height: int
    a0: float
    max_depth: int
    convention: RapConfig
    identification_image_ids: tuple[str, ...]
    leaves: tuple[QuadrantNode, ...]

    def __post_init__(self):
        object.__setattr__(self, "identification_image_ids",
                           tuple(self.identification_image_ids))
        object.__setattr__(self, "leaves", tuple(self.leaves))

    @property
    def extent(self) -> Rect:
        return Rect(0.0, 0.0, float(self.width), float(self.height))

    def leaf_rects(self) -> list[Rect]:
        return [leaf.rect for leaf in self.leaves]

    def covered_area(self) -> float:
        return sum(leaf.rect.area for leaf in self.leaves)


@dataclass(frozen=True)
class HairError:
    """Accuracy lost by only counting detections inside the region set.

    ``acc1`` is the RAP using every detection, ``acc2`` the RAP using only
    in-region detections against the full ground truth; ``error`` is their
    difference.
    """

    acc1: float
    acc2: float
    error: float


@dataclass(frozen=True)
class _ImageBoxes:
    image_id: str
    gt: tuple[BBox, ...]
    det: tuple[BBox, ...]


def _node_rap(population: Sequence[_ImageBoxes], cfg: RapConfig) -> float | None:
    per_image = [(ib.image_id, match_image(ib.gt, ib.det, cfg)) for ib in population]
    return rap(compile_ranked(per_image), cfg)


def _split_population(population, children):
    parts = [[] for _ in children]
    for ib in population:
        gt_parts = [[] for _ in children]
        det_parts = [[] for _ in children]
        for idx, box in zip(assign_to_regions(ib.gt, children), ib.gt):
            gt_parts[idx].append(box)
        for idx, box in zip(assign_to_regions(ib.det, children), ib.det):
            det_parts[idx].append(box)
        for k in range(len(children)):
            parts[k].append(_ImageBoxes(ib.image_id, tuple(gt_parts[k]), tuple(det_parts[k])))
    return parts


def max_splittable_depth(width: int, height: int) -> int:
    """Deepest level at which every node still measures at least 2x2 pixels."""
    depth = 0
    while min(width, height) >= 2 ** (depth + 1):
        depth += 1
    return depth


def _check_identify_inputs(dataset: CameraDataset, image_ids, max_depth: int) -> list[str]:
    ids = list(image_ids)
    if not ids:
        raise ValidationError("no identification images given")
    if len(set(ids)) != len(ids):
        raise ValidationError("identification image ids contain duplicates")
    known = set(dataset.image_ids())
    missing = [i for i in ids if i not in known]
    if missing:
        raise ValidationError(f"image ids not in dataset: {missing}")
    if max_depth < 0:
        raise ValidationError("max depth must be non-negative")
    limit = max_splittable_depth(dataset.width, dataset.height)
    if max_depth > limit:
        raise ValidationError(
            f"max depth {max_depth} exceeds splittable depth {limit} "
            f"for a {dataset.width}x{dataset.height} extent")
    return ids


def identify_hair(dataset: CameraDataset, image_ids: Sequence[str],
                  cfg: RapConfig, max_depth: int) -> Hair:
    """Recursively partition the extent and keep the high-accuracy quadrants.

    A node is accepted when its RAP on the given images strictly exceeds
    ``cfg.a0``; accepted nodes and nodes at ``max_depth`` stop the
    recursion. Nodes with no evidence (no ground truth, no detections) are
    accepted under the ``include`` policy and dropped under ``exclude``;
    either way they are not split further.
    """
    ids = _check_identify_inputs(dataset, image_ids, max_depth)
    wanted = set(ids)
    population = [
        _ImageBoxes(img.image_id, img.ground_truth, img.detections)
        for img in dataset.images if img.image_id in wanted
    ]

    leaves: list[QuadrantNode] = []

    def recurse(rect: Rect, path: str, depth: int, pop) -> None:
        value = _node_rap(pop, cfg)
        if value is None:
            if cfg.empty_region_policy == "include":
                leaves.append(QuadrantNode(path, rect, None))
            return
        if value > cfg.a0:
            leaves.append(QuadrantNode(path, rect, value))
            return
        if depth == max_depth:
            return
        children = split_quadrants(rect)
        parts = _split_population(pop, children)
        for name, child_rect, child_pop in zip(QUADRANT_NAMES, children, parts):
            recurse(child_rect, f"{path}.{name}" if path else name, depth + 1, child_pop)

    recurse(dataset.extent, "", 0, population)
    return Hair(
        camera_id=dataset.camera_id,
        width=dataset.width,
        height=dataset.height,
        a0=cfg.a0,
        max_depth=max_depth,
        convention=cfg,
        identification_image_ids=tuple(ids),
        leaves=tuple(leaves),
    )


def box_in_hair(box, hair: Hair) -> bool:
    """Majority-overlap membership: a box is inside iff at least half of its
    in-extent area lies within the union of the accepted quadrants (ties
    count as inside)."""
    inside = sum(intersection_area(box, leaf.rect) for leaf in hair.leaves)
    in_extent = intersection_area(box, hair.extent)
    return inside >= in_extent - inside


def hair_error(hair: Hair, eval_images: Sequence[ImageRecord], cfg: RapConfig,
               require_disjoint: bool = True) -> HairError:
    """Accuracy lost on held-out images by restricting to in-region detections.

    ``acc1`` uses every detection of ``eval_images``; ``acc2`` keeps only
    detections inside the region set (majority overlap) but matches them
    against the full ground truth of each image, so missed out-of-region
    vehicles still count against recall. Evaluation images should be
    disjoint from the identification images; pass ``require_disjoint=False``
    for deliberate diagnostic runs on the identification set.

    An undefined RAP (eval set with no boxes at all on either side) is
    treated as zero accuracy.
    """
    if require_disjoint:
        overlap = {img.image_id for img in eval_images} & set(hair.identification_image_ids)
        if overlap:
            raise ValidationError(
                f"evaluation images overlap identification images: {sorted(overlap)}")

    full = [(img.image_id, match_image(img.ground_truth, img.detections, cfg))
            for img in eval_images]
    acc1 = rap(compile_ranked(full), cfg)

    restricted = []
    for img in eval_images:
        kept = tuple(b for b in img.detections if box_in_hair(b, hair))
        restricted.append((img.image_id, match_image(img.ground_truth, kept, cfg)))
    acc2 = rap(compile_ranked(restricted), cfg)

    acc1 = 0.0 if acc1 is None else acc1
    acc2 = 0.0 if acc2 is None else acc2
    return HairError(acc1=acc1, acc2=acc2, error=acc1 - acc2)
