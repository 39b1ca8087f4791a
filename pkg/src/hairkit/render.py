"""Static vector-graphic overlays of one image's boxes, regions, and roads.

No raster imagery ships with the tool, so the overlay is a standalone SVG:
accepted quadrants are shaded, correctly detected vehicles are filled,
missed ones outlined, and false detections dashed. An existing camera frame
can be referenced as a background link.
"""

from __future__ import annotations

from .density import RoadSet
from .errors import ValidationError
from .model import CameraDataset, RapConfig
from .quadtree import Hair
from .region_eval import match_image


def _fmt(value: float) -> str:
    return f"{value:g}"


def _rect_el(x, y, w, h, style: str) -> str:
    return (f'  <rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" {style}/>')


def render_svg(dataset: CameraDataset, image_id: str, hair: Hair | None = None,
               roads: RoadSet | None = None, background: str | None = None) -> str:
    """Build the overlay for one image; output is deterministic."""
    try:
        record = dataset.image(image_id)
    except KeyError:
        raise ValidationError(f"image id not in dataset: {image_id!r}") from None

    w, h = dataset.width, dataset.height
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" '
        f'width="{w}" height="{h}">',
    ]
    if background is not None:
        lines.append(f'  <image href="{background}" x="0" y="0" '
                     f'width="{w}" height="{h}"/>')
    else:
        lines.append(_rect_el(0, 0, w, h, 'fill="#f4f4f4" stroke="#444444"'))

    if hair is not None:
        lines.append('  <g class="hair">')
        for leaf in hair.leaves:
            r = leaf.rect
            lines.append("  " + _rect_el(
                r.x, r.y, r.w, r.h,
                'fill="#d94040" fill-opacity="0.25" stroke="#d94040"'))
        lines.append('  </g>')

    if roads is not None:
        lines.append('  <g class="roads">')
        for road in roads.roads:
            points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in road.vertices)
            lines.append(f'    <polyline points="{points}" fill="none" '
                         f'stroke="#707070" stroke-width="2"/>')
        lines.append('  </g>')

    cfg = hair.convention if hair is not None else RapConfig()
    match = match_image(record.ground_truth, record.detections, cfg)
    is_tp = {o.det_index: o.is_tp for o in match.outcomes}
    matched_gt = {o.gt_index for o in match.outcomes if o.is_tp}

    lines.append('  <g class="boxes">')
    for j, box in enumerate(record.ground_truth):
        if j not in matched_gt:  # missed vehicle: outline only
            lines.append("  " + _rect_el(
                box.x, box.y, box.w, box.h,
                'class="fn" fill="none" stroke="#2060c0" stroke-width="1.5"'))
    for i, box in enumerate(record.detections):
        if is_tp[i]:
            style = ('class="tp" fill="#2060c0" fill-opacity="0.6" '
                     'stroke="#2060c0"')
        else:
            style = ('class="fp" fill="none" stroke="#c0a020" '
                     'stroke-width="1.5" stroke-dasharray="4 2"')
        lines.append("  " + _rect_el(box.x, box.y, box.w, box.h, style))
    lines.append('  </g>')
    lines.append('</svg>')
    return "\n".join(lines) + "\n"
