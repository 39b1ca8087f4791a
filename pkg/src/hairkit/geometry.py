"""Rectangle arithmetic, IoU, quadrant splitting, polyline clipping, and
ground-control-point homography estimation.

Everything here is a pure function on immutable inputs. Quadrant splitting
uses floor arithmetic so that the four children tile the parent exactly
even for odd pixel extents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ComputationError, ValidationError
from .model import BBox, Rect

#: Child order used everywhere a node is split or a tie is broken.
QUADRANT_NAMES = ("NW", "NE", "SW", "SE")

_INFINITY_EPS = 1e-12


def intersection_area(a, b) -> float:
    """Overlap area of two axis-aligned rectangles (Rect or BBox); 0 if disjoint."""
    w = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    h = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes with positive area."""
    if a.w <= 0 or a.h <= 0 or b.w <= 0 or b.h <= 0:
        raise ValueError("iou requires boxes with strictly positive area")
    inter = intersection_area(a, b)
    union = a.w * a.h + b.w * b.h - inter
    return inter / union


def split_quadrants(r: Rect) -> tuple[Rect, Rect, Rect, Rect]:
    """Split ``r`` into (NW, NE, SW, SE).

    NW takes the floored half sizes; NE/SW/SE absorb the remainders, so the
    children tile ``r`` exactly with disjoint interiors.
    """
    if r.w < 2 or r.h < 2:
        raise ValueError(f"unsplittable node: {r.w}x{r.h} (children would be empty)")
    hw = float(math.floor(r.w / 2))
    hh = float(math.floor(r.h / 2))
    nw = Rect(r.x, r.y, hw, hh)
    ne = Rect(r.x + hw, r.y, r.w - hw, hh)
    sw = Rect(r.x, r.y + hh, hw, r.h - hh)
    se = Rect(r.x + hw, r.y + hh, r.w - hw, r.h - hh)
    return nw, ne, sw, se


@dataclass(frozen=True)
class Polyline:
    """Open polygonal chain in pixel space with at least two vertices."""

    road_id: str
    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise ValueError("polyline needs at least 2 vertices")
        for a, b in zip(verts, verts[1:]):
            if a == b:
                raise ValueError(f"consecutive duplicate vertex {a} in road {self.road_id!r}")

    def length(self) -> float:
        return sum(math.dist(a, b) for a, b in zip(self.vertices, self.vertices[1:]))


def clip_segment(p0: tuple[float, float], p1: tuple[float, float],
                 r: Rect) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Parametric (Liang-Barsky) clip of a segment against ``r``.

    Returns the clipped endpoints, or None when the segment lies entirely
    outside. Degenerate overlaps along an edge are kept (length may be 0).
    """
    x0, y0 = p0
    x1, y1 = p1
    dx = x1 - x0
    dy = y1 - y0
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x0 - r.x), (dx, r.x2 - x0), (-dy, y0 - r.y), (dy, r.y2 - y0)):
        if p == 0:
            if q < 0:
                return None
            continue
        t = q / p
        if p < 0:
            if t > t1:
                return None
            if t > t0:
                t0 = t
        else:
            if t < t0:
                return None
            if t < t1:
                t1 = t
    return (x0 + t0 * dx, y0 + t0 * dy), (x0 + t1 * dx, y0 + t1 * dy)


@dataclass(frozen=True)
class Homography:
    """Projective plane mapping, stored row-major with the bottom-right entry 1."""

    matrix: tuple[tuple[float, float, float], ...]
    unit: str = "world"

    def __post_init__(self):
        m = tuple(tuple(float(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if len(m) != 3 or any(len(row) != 3 for row in m):
            raise ValueError("homography matrix must be 3x3")
        if abs(self._det()) < 1e-9:
            raise ValidationError("homography matrix is singular")

    def _det(self) -> float:
        (a, b, c), (d, e, f), (g, h, i) = self.matrix
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def apply(self, point: tuple[float, float]) -> tuple[float, float]:
        """Map a pixel point into world coordinates."""
        x, y = point
        m = self.matrix
        denom = m[2][0] * x + m[2][1] * y + m[2][2]
        if abs(denom) < _INFINITY_EPS:
            raise ComputationError(f"point ({x}, {y}) maps to the plane at infinity")
        wx = (m[0][0] * x + m[0][1] * y + m[0][2]) / denom
        wy = (m[1][0] * x + m[1][1] * y + m[1][2]) / denom
        return wx, wy

    def inverse(self) -> Homography:
        inv = np.linalg.inv(np.array(self.matrix, dtype=float))
        inv = inv / inv[2, 2]
        return Homography(tuple(tuple(row) for row in inv), unit=self.unit)


def clip_polyline_length(p: Polyline, r: Rect, h: Homography | None = None) -> float:
    """Total length of ``p`` inside ``r``.

    Without a homography the result is in pixels. With one, each clipped
    segment's endpoints are mapped into world coordinates first and the
    result is in world units.
    """
    if r.w <= 0 or r.h <= 0:
        raise ValueError("clip target rect must be non-empty")
    total = 0.0
    for a, b in zip(p.vertices, p.vertices[1:]):
        clipped = clip_segment(a, b, r)
        if clipped is None:
            continue
        q0, q1 = clipped
        if h is not None:
            q0 = h.apply(q0)
            q1 = h.apply(q1)
        total += math.dist(q0, q1)
    return total


def _normalization(points: np.ndarray) -> np.ndarray:
    # Similarity transform moving the centroid to the origin and the mean
    # distance to sqrt(2); standard conditioning for the linear solve.
    centroid = points.mean(axis=0)
    dist = np.sqrt(((points - centroid) ** 2).sum(axis=1)).mean()
    scale = math.sqrt(2) / dist if dist > 0 else 1.0
    return np.array([
        [scale, 0.0, -scale * centroid[0]],
        [0.0, scale, -scale * centroid[1]],
        [0.0, 0.0, 1.0],
    ])


def estimate_homography(pairs, unit: str = "world") -> tuple[Homography, float]:
    """Least-squares projective fit to (pixel, world) control-point pairs.

    Requires at least 4 pairs in general position. Returns the fitted
    mapping together with the root-mean-square reprojection residual (in
    world units) over the input pairs.
    """
    pairs = list(pairs)
    if len(pairs) < 4:
        raise ValidationError(f"homography needs at least 4 point pairs, got {len(pairs)}")
    src = np.array([p[0] for p in pairs], dtype=float)
    dst = np.array([p[1] for p in pairs], dtype=float)

    t_src = _normalization(src)
    t_dst = _normalization(dst)
    ones = np.ones((len(pairs), 1))
    src_n = (t_src @ np.hstack([src, ones]).T).T
    dst_n = (t_dst @ np.hstack([dst, ones]).T).T

    rows = []
    for (sx, sy, _), (dx, dy, _) in zip(src_n, dst_n):
        rows.append([-sx, -sy, -1, 0, 0, 0, dx * sx, dx * sy, dx])
        rows.append([0, 0, 0, -sx, -sy, -1, dy * sx, dy * sy, dy])
    a = np.array(rows, dtype=float)

    _, s, vt = np.linalg.svd(a)
    if s[7] < 1e-10 * s[0]:
        raise ValidationError(
            "rank-deficient control points (collinear or duplicated)")
    h_n = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_dst) @ h_n @ t_src
    if abs(h[2, 2]) < _INFINITY_EPS:
        raise ValidationError("degenerate homography (vanishing scale entry)")
    h = h / h[2, 2]

    mapping = Homography(tuple(tuple(row) for row in h), unit=unit)
    sq_err = 0.0
    for (px, py), (wx, wy) in pairs:
        mx, my = mapping.apply((px, py))
        sq_err += (mx - wx) ** 2 + (my - wy) ** 2
    residual = math.sqrt(sq_err / len(pairs))
    return mapping, residual
