"""Brute-force re-derivation of the high-accuracy region set.

Used to cross-check :func:`hairkit.quadtree.identify_hair`. Instead of
recursing, it enumerates every quadtree node down to the maximal depth,
re-derives each node's box population from the root with its own overlap
argmax, and re-runs matching and the average-precision arithmetic with its
own code. Only the geometry primitives are shared with the main
implementation, so a bug in traversal, incremental assignment, or pooling
cannot hide.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .geometry import QUADRANT_NAMES, intersection_area, iou, split_quadrants
from .model import CameraDataset, RapConfig
from .quadtree import Hair, QuadrantNode, _check_identify_inputs


def _argmax_overlap(box, rects) -> int:
    best_idx = -1
    best_area = 0.0
    for idx, rect in enumerate(rects):
        area = intersection_area(box, rect)
        if area > best_area:
            best_area = area
            best_idx = idx
    if best_idx < 0:
        raise ValueError("box overlaps no candidate rect")
    return best_idx


def _population_at(dataset, records, tokens):
    rect = dataset.extent
    pop = [(img.image_id, list(img.ground_truth), list(img.detections))
           for img in records]
    for token in tokens:
        kids = split_quadrants(rect)
        target = QUADRANT_NAMES.index(token)
        pop = [
            (image_id,
             [b for b in gts if _argmax_overlap(b, kids) == target],
             [b for b in dets if _argmax_overlap(b, kids) == target])
            for image_id, gts, dets in pop
        ]
        rect = kids[target]
    return rect, pop


def _match(gts, dets, cfg):
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    taken = [False] * len(gts)
    outcomes = []
    for i in order:
        best_j, best_iou = -1, -1.0
        for j, g in enumerate(gts):
            if not taken[j]:
                value = iou(dets[i], g)
                if value > best_iou:
                    best_iou, best_j = value, j
        is_tp = best_j >= 0 and best_iou > cfg.iou_threshold
        if is_tp:
            taken[best_j] = True
        outcomes.append((dets[i].score, i, is_tp))
    return outcomes


def _node_rap(pop, cfg):
    pooled = []
    n_gt = 0
    for image_id, gts, dets in pop:
        n_gt += len(gts)
        for score, pos, is_tp in _match(gts, dets, cfg):
            pooled.append((score, image_id, pos, is_tp))
    pooled.sort(key=lambda e: (-e[0], e[1], e[2]))
    if n_gt == 0:
        return 0.0 if pooled else None
    tp = 0
    curve = []
    for pos, (_, _, _, is_tp) in enumerate(pooled, start=1):
        tp += is_tp
        curve.append((tp / pos, tp / n_gt))
    total = 0.0
    for level_idx, level in enumerate(cfg.recall_levels):
        if level_idx == 0 and cfg.zero_recall_mode == "zeroed":
            continue
        total += max((p for p, r in curve if r >= level), default=0.0)
    return total / len(cfg.recall_levels)


def brute_force_hair(dataset: CameraDataset, image_ids: Sequence[str],
                     cfg: RapConfig, max_depth: int) -> Hair:
    """Acceptance-set characterization of the recursive identification.

    A node belongs to the result iff it is accepted (RAP strictly above the
    threshold, or no-evidence under the ``include`` policy) and every
    proper ancestor kept the partition going (defined RAP at or below the
    threshold).
    """
    ids = _check_identify_inputs(dataset, image_ids, max_depth)
    wanted = set(ids)
    records = [img for img in dataset.images if img.image_id in wanted]

    values: dict[tuple[str, ...], float | None] = {}
    rects = {}
    for depth in range(max_depth + 1):
        for tokens in itertools.product(QUADRANT_NAMES, repeat=depth):
            rect, pop = _population_at(dataset, records, tokens)
            rects[tokens] = rect
            values[tokens] = _node_rap(pop, cfg)

    def accepted(tokens) -> bool:
        value = values[tokens]
        if value is None:
            return cfg.empty_region_policy == "include"
        return value > cfg.a0

    def ancestors_continue(tokens) -> bool:
        for k in range(len(tokens)):
            value = values[tokens[:k]]
            if value is None or value > cfg.a0:
                return False
        return True

    chosen = [t for t in values if accepted(t) and ancestors_continue(t)]
    chosen.sort(key=lambda t: tuple(QUADRANT_NAMES.index(tok) for tok in t))
    leaves = tuple(
        QuadrantNode(".".join(t), rects[t], values[t]) for t in chosen
    )
    return Hair(
        camera_id=dataset.camera_id,
        width=dataset.width,
        height=dataset.height,
        a0=cfg.a0,
        max_depth=max_depth,
        convention=cfg,
        identification_image_ids=tuple(ids),
        leaves=leaves,
    )
