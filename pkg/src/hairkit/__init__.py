"""Quadtree-based high-accuracy identification regions for detection data.

Given images with ground-truth and detected bounding boxes from one fixed
camera, this package recursively partitions the camera extent into
quadrants, keeps those whose regional average precision exceeds a
threshold (the high-accuracy identification region, HAIR), selects robust
algorithm parameters by resampling, and uses the accepted regions to
produce improved traffic-density estimates.
"""

from .density import (DensityReport, DensityRow, RoadSet, estimate_density,
                      evaluate_density, region_road_length)
from .errors import (ComputationError, DatasetValidationError, FormatError,
                     HairkitError, ValidationError)
from .geometry import (Homography, Polyline, clip_polyline_length,
                       clip_segment, estimate_homography, intersection_area,
                       iou, split_quadrants)
from .model import (BBox, CameraDataset, ImageRecord, RapConfig, Rect,
                    Violation, collect_violations, make_dataset,
                    validate_dataset)
from .oracle import brute_force_hair
from .quadtree import (Hair, HairError, QuadrantNode, box_in_hair,
                       hair_error, identify_hair, max_splittable_depth)
from .region_eval import (DetectionOutcome, ImageMatch, RankedOutcomes,
                          assign_to_regions, compile_ranked, match_image,
                          precision_recall, rap)
from .render import render_svg
from .resampling import (ParameterChoice, SweepConfig, SweepGrid, rmse,
                         run_sweep, select_parameters)
from .synth import (Curve, SynthSpec, bottom_half_spec, degraded_spec,
                    generate_camera, perfect_spec)

__version__ = "0.1.0"

__all__ = [
    "BBox", "CameraDataset", "ComputationError", "Curve",
    "DatasetValidationError", "DensityReport", "DensityRow",
    "DetectionOutcome", "FormatError", "Hair", "HairError", "HairkitError",
    "Homography", "ImageMatch", "ImageRecord", "ParameterChoice", "Polyline",
    "QuadrantNode", "RankedOutcomes", "RapConfig", "Rect", "RoadSet",
    "SweepConfig", "SweepGrid", "SynthSpec", "ValidationError", "Violation",
    "assign_to_regions", "bottom_half_spec", "box_in_hair",
    "brute_force_hair", "clip_polyline_length", "clip_segment",
    "collect_violations", "compile_ranked", "degraded_spec",
    "estimate_density", "estimate_homography", "evaluate_density",
    "generate_camera", "hair_error", "identify_hair", "intersection_area",
    "iou", "make_dataset", "match_image", "max_splittable_depth",
    "perfect_spec", "precision_recall", "rap", "region_road_length",
    "render_svg", "rmse", "run_sweep", "select_parameters",
    "split_quadrants", "validate_dataset",
]
