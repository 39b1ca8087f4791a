"""Shared builders for hand-crafted datasets used across the test modules."""

from __future__ import annotations

from hairkit import (BBox, CameraDataset, Hair, ImageRecord, QuadrantNode,
                     RapConfig, Rect, split_quadrants, validate_dataset)

QUADS = ("NW", "NE", "SW", "SE")


def quadrant_rect(width: float, height: float, path: str) -> Rect:
    rect = Rect(0.0, 0.0, float(width), float(height))
    for token in path.split(".") if path else []:
        rect = split_quadrants(rect)[QUADS.index(token)]
    return rect


def centered_box(rect: Rect, dx: float = 0.0, dy: float = 0.0,
                 size: float = 10.0, score: float | None = None) -> BBox:
    cx = rect.x + rect.w / 2 + dx
    cy = rect.y + rect.h / 2 + dy
    return BBox(cx - size / 2, cy - size / 2, size, size, score)


def with_score(box: BBox, score: float) -> BBox:
    return BBox(box.x, box.y, box.w, box.h, score)


def dataset_of(images: dict, width: int = 100, height: int = 100,
               camera_id: str = "cam") -> CameraDataset:
    """images: {image_id: (gt boxes, det boxes)}."""
    records = tuple(
        ImageRecord(image_id, tuple(gt), tuple(det))
        for image_id, (gt, det) in images.items()
    )
    return validate_dataset(CameraDataset(camera_id, width, height, records))


def figure_pool_dataset() -> CameraDataset:
    """Three-image pool on a 100x100 extent: 10 ground truths, six true
    positives at confidence ranks 1-6, one false positive at rank 7.

    Ranks 1-5 sit in the lower half, rank 6 in the upper half, and the
    false positive in the lower half, so restricting to the two lower
    quadrants keeps everything except the rank-6 detection.
    """
    a_gt = [BBox(10, 60, 10, 10), BBox(30, 60, 10, 10), BBox(60, 60, 10, 10),
            BBox(10, 10, 10, 10)]
    a_det = [with_score(a_gt[0], 0.95), with_score(a_gt[1], 0.90),
             with_score(a_gt[2], 0.85)]
    b_gt = [BBox(10, 70, 10, 10), BBox(40, 70, 10, 10), BBox(20, 15, 10, 10)]
    b_det = [with_score(b_gt[0], 0.80), with_score(b_gt[1], 0.75),
             BBox(70, 80, 10, 10, 0.65)]  # rank-7 false positive
    c_gt = [BBox(15, 20, 10, 10), BBox(50, 10, 10, 10), BBox(80, 15, 10, 10)]
    c_det = [with_score(c_gt[0], 0.70)]  # rank-6 true positive, upper half
    return dataset_of({"a": (a_gt, a_det), "b": (b_gt, b_det), "c": (c_gt, c_det)})


def lower_half_hair(cfg: RapConfig | None = None) -> Hair:
    """Hand-built region set covering exactly the two lower quadrants."""
    cfg = cfg or RapConfig()
    return Hair(
        camera_id="cam", width=100, height=100, a0=cfg.a0, max_depth=1,
        convention=cfg, identification_image_ids=("ident",),
        leaves=(
            QuadrantNode("SW", quadrant_rect(100, 100, "SW"), 1.0),
            QuadrantNode("SE", quadrant_rect(100, 100, "SE"), 1.0),
        ),
    )


def bottom_half_hand_dataset(n_images: int = 2) -> CameraDataset:
    """Every bottom-half vehicle detected perfectly, every top-half one missed."""
    images = {}
    for k in range(n_images):
        gt, det = [], []
        for path in QUADS:
            rect = quadrant_rect(100, 100, path)
            for i, dx in enumerate((-12.0, 12.0)):
                box = centered_box(rect, dx=dx)
                gt.append(box)
                if path in ("SW", "SE"):
                    det.append(with_score(box, 0.9 - 0.01 * i - 0.001 * k))
        images[f"img{k}"] = (gt, det)
    return dataset_of(images)


def structural_dataset() -> CameraDataset:
    """Single-image 704x480 dataset whose region identification accepts three
    depth-1 quadrants, keeps splitting the fourth, and certifies exactly
    three quadrants at depth 3.

    Contents: NE/SW/SE hold 18 perfectly detected vehicles each; NW holds
    26 vehicles of which only 5 (in three specific depth-3 cells) are
    detected. Every detection is exact, so precision is 1 everywhere and
    the whole-extent recall is 59/80 = 0.7375: eight of the eleven recall
    levels interpolate to 1, i.e. the root scores 8/11 and fails the 0.75
    threshold while the three clean quadrants pass.
    """
    width, height = 704, 480
    gt: list[BBox] = []
    det: list[BBox] = []

    def pair(path: str, dx: float, dy: float, score: float) -> None:
        box = centered_box(quadrant_rect(width, height, path), dx, dy)
        gt.append(box)
        det.append(with_score(box, score))

    def miss(path: str, dx: float, dy: float = 0.0) -> None:
        gt.append(centered_box(quadrant_rect(width, height, path), dx, dy))

    pair("NW.NW.NW", -12, 0, 0.95)
    pair("NW.NW.NW", 12, 0, 0.94)
    pair("NW.NW.NE", -12, 0, 0.93)
    pair("NW.NW.NE", 12, 0, 0.92)
    for dx in (-12.0, 12.0):
        miss("NW.NW.SW", dx)
        miss("NW.NW.SE", dx)
    pair("NW.NE.NW", 0, 0, 0.91)
    for path in ("NW.NE.NE", "NW.NE.SW", "NW.NE.SE"):
        for dx in (-20.0, 0.0, 20.0):
            miss(path, dx)
    for parent in ("NW.SW", "NW.SE"):
        for child in QUADS:
            miss(f"{parent}.{child}", 0.0)

    score = 0.80
    for path in ("NE", "SW", "SE"):
        for dx in (-75.0, -45.0, -15.0, 15.0, 45.0, 75.0):
            for dy in (-50.0, 0.0, 50.0):
                pair(path, dx, dy, score)
                score -= 0.001

    return dataset_of({"img": (gt, det)}, width=width, height=height)
