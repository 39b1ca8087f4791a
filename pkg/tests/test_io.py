import json

import pytest

from hairkit import (DatasetValidationError, FormatError, Polyline, RapConfig,
                     RoadSet, SweepConfig, SweepGrid, bottom_half_spec,
                     degraded_spec, evaluate_density, generate_camera,
                     identify_hair)
from hairkit import io

from helpers import bottom_half_hand_dataset, dataset_of, figure_pool_dataset


def test_dataset_round_trip(tmp_path):
    ds = figure_pool_dataset()
    path = tmp_path / "ds.json"
    io.save_dataset(ds, path)
    assert io.load_dataset(path) == ds


def test_dataset_minimal_file(tmp_path):
    path = tmp_path / "min.json"
    path.write_text(json.dumps({
        "format_version": "1", "kind": "dataset", "camera_id": "c",
        "width": 100, "height": 100,
        "images": [{"image_id": "a",
                    "ground_truth": [{"x": 1, "y": 2, "w": 3, "h": 4}],
                    "detections": [{"x": 1, "y": 2, "w": 3, "h": 4, "score": 0.5}]}],
    }))
    ds = io.load_dataset(path)
    assert ds.images[0].ground_truth[0].w == 3
    assert ds.images[0].detections[0].score == 0.5


def test_dataset_detection_missing_score_names_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "format_version": "1", "kind": "dataset", "camera_id": "c",
        "width": 100, "height": 100,
        "images": [{"image_id": "a", "ground_truth": [],
                    "detections": [{"x": 1, "y": 2, "w": 3, "h": 4}]}],
    }))
    with pytest.raises(FormatError, match='"score"'):
        io.load_dataset(path)


def test_dataset_negative_width_box_fails_validation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "format_version": "1", "kind": "dataset", "camera_id": "c",
        "width": 100, "height": 100,
        "images": [{"image_id": "a",
                    "ground_truth": [{"x": 1, "y": 2, "w": -3, "h": 4}],
                    "detections": []}],
    }))
    with pytest.raises(DatasetValidationError, match="degenerate box"):
        io.load_dataset(path)


def test_unknown_format_version_rejected(tmp_path):
    path = tmp_path / "v2.json"
    path.write_text(json.dumps({"format_version": "2", "kind": "dataset"}))
    with pytest.raises(FormatError, match="format_version"):
        io.load_dataset(path)


def test_kind_mismatch_rejected(tmp_path):
    ds = figure_pool_dataset()
    path = tmp_path / "ds.json"
    io.save_dataset(ds, path)
    with pytest.raises(FormatError, match="kind"):
        io.load_hair(path)


def test_parse_error_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"format_version": "1",\n  "kind": }')
    with pytest.raises(FormatError, match="line 2"):
        io.load_dataset(path)


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(FormatError, match="cannot read"):
        io.load_dataset(tmp_path / "absent.json")


def test_roads_round_trip(tmp_path):
    roads = RoadSet(
        roads=(Polyline("a", ((0.0, 1.0), (5.0, 2.5))),
               Polyline("b", ((3.0, 3.0), (4.0, 4.0), (9.0, 1.0)))),
        gcps=(((0.0, 0.0), (1.0, 1.0)), ((10.0, 0.0), (2.0, 1.0)),
              ((10.0, 10.0), (2.0, 2.0)), ((0.0, 10.0), (1.0, 2.0))),
        unit="ft", unit_scale=1 / 5280,
    )
    path = tmp_path / "roads.json"
    io.save_roads(roads, path)
    assert io.load_roads(path) == roads


def test_roads_without_gcps_round_trip(tmp_path):
    roads = RoadSet(roads=(Polyline("a", ((0.0, 1.0), (5.0, 2.5))),))
    path = tmp_path / "roads.json"
    io.save_roads(roads, path)
    assert io.load_roads(path) == roads


def test_hair_round_trip(tmp_path):
    ds = bottom_half_hand_dataset()
    hair = identify_hair(ds, ds.image_ids(), RapConfig(), 1)
    path = tmp_path / "hair.json"
    io.save_hair(hair, path)
    assert io.load_hair(path) == hair


def test_empty_hair_round_trip(tmp_path):
    ds = bottom_half_hand_dataset()
    hair = identify_hair(ds, ds.image_ids(), RapConfig(), 0)
    assert hair.leaves == ()
    path = tmp_path / "hair.json"
    io.save_hair(hair, path)
    assert io.load_hair(path) == hair


def test_tampered_leaf_rect_is_an_integrity_error(tmp_path):
    ds = bottom_half_hand_dataset()
    hair = identify_hair(ds, ds.image_ids(), RapConfig(), 1)
    path = tmp_path / "hair.json"
    io.save_hair(hair, path)
    obj = json.loads(path.read_text())
    obj["leaves"][0]["rect"]["x"] += 1
    path.write_text(json.dumps(obj))
    with pytest.raises(FormatError, match="inconsistent with path"):
        io.load_hair(path)


def test_hair_leaf_deeper_than_max_depth_rejected(tmp_path):
    ds = bottom_half_hand_dataset()
    hair = identify_hair(ds, ds.image_ids(), RapConfig(), 1)
    path = tmp_path / "hair.json"
    io.save_hair(hair, path)
    obj = json.loads(path.read_text())
    obj["max_depth"] = 0
    path.write_text(json.dumps(obj))
    with pytest.raises(FormatError, match="deeper than max_depth"):
        io.load_hair(path)


def test_sweep_round_trip(tmp_path):
    config = SweepConfig(n_values=(3, 5), d0_values=(1, 2), iterations=2,
                         holdout_size=2, seed=9)
    grid = SweepGrid(
        cells={(3, 1): 0.5, (3, 2): 0.25, (5, 1): 0.4, (5, 2): 0.2},
        seed=9, config=config)
    path = tmp_path / "sweep.json"
    io.save_sweep(grid, path)
    assert io.load_sweep(path) == grid


def test_sweep_round_trip_with_errors(tmp_path):
    config = SweepConfig(n_values=(3,), d0_values=(1,), iterations=2,
                         holdout_size=2, seed=9)
    grid = SweepGrid(cells={(3, 1): 0.5}, seed=9, config=config,
                     errors={(3, 1): (0.5, 0.5)})
    path = tmp_path / "sweep.json"
    io.save_sweep(grid, path)
    assert io.load_sweep(path) == grid


def test_sweep_missing_cell_rejected(tmp_path):
    config = SweepConfig(n_values=(3, 5), d0_values=(1,), iterations=2,
                         holdout_size=2)
    grid = SweepGrid(cells={(3, 1): 0.5, (5, 1): 0.4}, seed=0, config=config)
    path = tmp_path / "sweep.json"
    io.save_sweep(grid, path)
    obj = json.loads(path.read_text())
    del obj["cells"][0]
    path.write_text(json.dumps(obj))
    with pytest.raises(FormatError, match="missing"):
        io.load_sweep(path)


def test_sweep_config_round_trip(tmp_path):
    config = SweepConfig(n_values=(4, 8), d0_values=(1, 2, 3), iterations=7,
                         holdout_size=3, a0=0.6, seed=17,
                         rap=RapConfig(zero_recall_mode="zeroed"))
    path = tmp_path / "cfg.json"
    io.save_sweep_config(config, path)
    assert io.load_sweep_config(path) == config


def test_sweep_config_defaults(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"format_version": "1", "kind": "sweep_config",
                                "iterations": 5}))
    config = io.load_sweep_config(path)
    assert config.iterations == 5
    assert config.n_values == tuple(range(10, 101, 10))
    assert config.holdout_size == 10


def test_synth_spec_round_trip(tmp_path):
    for spec in (degraded_spec(seed=3), bottom_half_spec(seed=4)):
        path = tmp_path / "spec.json"
        io.save_synth_spec(spec, path)
        assert io.load_synth_spec(path) == spec


def test_save_is_deterministic(tmp_path):
    ds = figure_pool_dataset()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.save_dataset(ds, a)
    io.save_dataset(ds, b)
    assert a.read_bytes() == b.read_bytes()


def test_density_report_format(tmp_path):
    ds = figure_pool_dataset()
    roads = RoadSet(roads=(Polyline("r", ((50.0, 2.0), (50.0, 98.0))),))
    report = evaluate_density(ds, ["a", "b"], roads)
    path = tmp_path / "report.tsv"
    io.save_density_report(report, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "image_id\tscope\tobserved\tpredicted\terror"
    assert len(lines) == 1 + 2 + 1  # header, two rows, one summary
    assert lines[-1].startswith("OVERALL_RMSE\tfull_extent\t\t\t")
    for line in lines[1:3]:
        fields = line.split("\t")
        assert len(fields) == 5
        assert float(fields[4]) == float(fields[3]) - float(fields[2])


def test_coco_converter():
    coco = {
        "images": [
            {"id": 1, "width": 100, "height": 100, "file_name": "f1.jpg"},
            {"id": 2, "width": 100, "height": 100, "file_name": "f2.jpg"},
        ],
        "annotations": [
            {"image_id": 1, "bbox": [10, 10, 20, 20]},
            {"image_id": 2, "bbox": [30, 30, 10, 10]},
            {"image_id": 2, "bbox": [50, 50, 10, 10]},
        ],
    }
    detections = [{"image_id": 1, "bbox": [11, 11, 20, 20], "score": 0.9}]
    ds = io.dataset_from_coco(coco, detections)
    assert ds.width == 100
    by_id = {img.image_id: img for img in ds.images}
    assert len(by_id["f1.jpg"].ground_truth) == 1
    assert len(by_id["f2.jpg"].ground_truth) == 2
    assert by_id["f1.jpg"].detections[0].score == 0.9


def test_coco_converter_rejects_mixed_extents():
    coco = {
        "images": [
            {"id": 1, "width": 100, "height": 100},
            {"id": 2, "width": 200, "height": 100},
        ],
        "annotations": [],
    }
    with pytest.raises(FormatError, match="extent differs"):
        io.dataset_from_coco(coco)


def test_generated_dataset_round_trip(tmp_path):
    ds = generate_camera(degraded_spec(seed=21, width=352, height=240), 6)
    path = tmp_path / "gen.json"
    io.save_dataset(ds, path)
    assert io.load_dataset(path) == ds
