import pytest

from hairkit import (BBox, CameraDataset, DatasetValidationError, ImageRecord,
                     RapConfig, collect_violations, validate_dataset)

from helpers import dataset_of


def _dataset(images):
    return CameraDataset("cam", 704, 480, tuple(images))


def test_valid_dataset_returned_unchanged():
    ds = dataset_of({
        "a": ([BBox(1, 1, 5, 5)], [BBox(1, 1, 5, 5, 0.9)]),
        "b": ([BBox(10, 10, 5, 5)], []),
    })
    assert validate_dataset(ds) is ds


def test_validation_is_idempotent():
    ds = dataset_of({"a": ([BBox(1, 1, 5, 5)], [])})
    assert collect_violations(validate_dataset(ds)) == []


def test_degenerate_detection_box():
    ds = _dataset([ImageRecord("a", (), (BBox(5, 5, 0, 10, 0.5),))])
    (violation,) = collect_violations(ds)
    assert violation.rule == "degenerate box"
    assert (violation.image_id, violation.kind, violation.box_index) == ("a", "det", 0)


def test_box_fully_outside_extent():
    # overlap with the 704x480 extent is exactly 0 by rectangle intersection
    ds = _dataset([ImageRecord("a", (BBox(-50, -50, 10, 10),), ())])
    (violation,) = collect_violations(ds)
    assert violation.rule == "outside extent"


def test_partially_outside_box_is_allowed():
    ds = _dataset([ImageRecord("a", (BBox(-5, -5, 10, 10),), ())])
    assert collect_violations(ds) == []


def test_detection_missing_score():
    ds = _dataset([ImageRecord("a", (), (BBox(1, 1, 5, 5),))])
    (violation,) = collect_violations(ds)
    assert violation.rule == "missing score"


def test_score_zero_is_legal():
    ds = _dataset([ImageRecord("a", (), (BBox(1, 1, 5, 5, 0.0),))])
    assert collect_violations(ds) == []


def test_score_out_of_range():
    ds = _dataset([ImageRecord("a", (), (BBox(1, 1, 5, 5, 1.2),))])
    (violation,) = collect_violations(ds)
    assert violation.rule == "score out of range"


def test_ground_truth_with_score_flagged():
    ds = _dataset([ImageRecord("a", (BBox(1, 1, 5, 5, 0.9),), ())])
    (violation,) = collect_violations(ds)
    assert violation.rule == "unexpected score"


def test_duplicate_image_id():
    record = ImageRecord("a", (BBox(1, 1, 5, 5),), ())
    ds = _dataset([record, record])
    (violation,) = collect_violations(ds)
    assert violation.rule == "duplicate image_id"


def test_every_violation_pinpoints_one_box():
    ds = _dataset([
        ImageRecord("a", (BBox(1, 1, 0, 5),), (BBox(1, 1, 5, 5),)),
        ImageRecord("b", (BBox(-99, -99, 2, 2),), ()),
    ])
    violations = collect_violations(ds)
    assert len(violations) == 3
    keys = {(v.image_id, v.kind, v.box_index, v.rule) for v in violations}
    assert keys == {
        ("a", "gt", 0, "degenerate box"),
        ("a", "det", 0, "missing score"),
        ("b", "gt", 0, "outside extent"),
    }


def test_validate_raises_with_full_report():
    ds = _dataset([ImageRecord("a", (BBox(1, 1, 0, 5),), (BBox(1, 1, 5, 5),))])
    with pytest.raises(DatasetValidationError) as excinfo:
        validate_dataset(ds)
    assert len(excinfo.value.violations) == 2


def test_bad_extent():
    ds = CameraDataset("cam", 0, 480, ())
    (violation,) = collect_violations(ds)
    assert violation.rule == "bad extent"


@pytest.mark.parametrize("kwargs", [
    {"recall_levels": (0.1, 0.5, 1.0)},  # must start at 0
    {"recall_levels": (0.0, 0.5)},  # must end at 1
    {"recall_levels": (0.0, 0.6, 0.5, 1.0)},  # must be non-decreasing
    {"iou_threshold": 0.0},
    {"iou_threshold": 1.0},
    {"a0": 1.0},
    {"zero_recall_mode": "sometimes"},
    {"empty_region_policy": "maybe"},
])
def test_rap_config_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        RapConfig(**kwargs)


def test_rap_config_defaults():
    cfg = RapConfig()
    assert len(cfg.recall_levels) == 11
    assert cfg.recall_levels[0] == 0.0 and cfg.recall_levels[-1] == 1.0
    assert cfg.a0 == 0.75
    assert cfg.iou_threshold == 0.5
    assert cfg.zero_recall_mode == "counted"
    assert cfg.empty_region_policy == "exclude"
