import json
import logging
import math

import pytest
from hypothesis import given, strategies as st
from shapely.geometry import MultiPoint

from conftest import det, gt
from loggauge.annot_io import (
    Dataset,
    Detection,
    GroundTruth,
    dataset_to_coco_dict,
    load_dataset,
    load_manifest,
    load_manifest_file,
    manifest_to_json,
    parse_coco_dataset,
    parse_detections,
    parse_yolo_gt,
    write_detections,
    write_yolo_gt,
)
from loggauge.errors import ParseError, UsageError
from loggauge.geometry import NormBox


@st.composite
def gt_records(draw, image_id="img"):
    # corners kept comfortably inside the unit square so that 6-decimal
    # rounding cannot push them past the edge tolerance
    x1 = draw(st.floats(0.001, 0.99))
    x2 = draw(st.floats(x1 + 0.001, 0.999))
    y1 = draw(st.floats(0.001, 0.99))
    y2 = draw(st.floats(y1 + 0.001, 0.999))
    cls = draw(st.integers(0, 5))
    box = NormBox((x1 + x2) / 2, (y1 + y2) / 2, x2 - x1, y2 - y1)
    return GroundTruth(image_id=image_id, class_id=cls, box=box)


class TestYoloGt:
    def test_parse_simple(self):
        recs = parse_yolo_gt("0 0.5 0.5 0.2 0.1\n1 0.25 0.75 0.1 0.1\n", "a")
        assert len(recs) == 2
        assert recs[0].class_id == 0
        assert recs[0].box == NormBox(0.5, 0.5, 0.2, 0.1)
        assert recs[1].class_id == 1
        assert recs[1].image_id == "a"

    def test_empty_file_is_empty_image(self):
        assert parse_yolo_gt("", "a") == []
        assert parse_yolo_gt("\n\n", "a") == []

    def test_order_preserved(self):
        recs = parse_yolo_gt("0 0.2 0.2 0.1 0.1\n0 0.8 0.8 0.1 0.1\n", "a")
        assert [r.box.cx for r in recs] == [0.2, 0.8]

    def test_write_six_decimals(self):
        line = write_yolo_gt([gt("a", cx=1 / 3, cy=0.5, w=0.2, h=0.2)])
        assert line == "0 0.333333 0.500000 0.200000 0.200000\n"

    def test_write_empty(self):
        assert write_yolo_gt([]) == ""

    def test_write_rejects_mixed_images(self):
        with pytest.raises(UsageError):
            write_yolo_gt([gt("a"), gt("b")])

    @pytest.mark.parametrize(
        "bad,fragment",
        [
            ("0 0.5 0.5 0.2", "5 fields"),
            ("x 0.5 0.5 0.2 0.2", "class"),
            ("0 1.5 0.5 0.2 0.2", "cx"),
            ("0 0.5 0.5 0 0.2", "positive"),
            ("0 0.5 abc 0.2 0.2", "cy"),
        ],
    )
    def test_malformed_line_rejected(self, bad, fragment):
        with pytest.raises(ParseError, match=fragment):
            parse_yolo_gt(bad, "a")

    def test_error_names_line_number(self):
        content = "0 0.5 0.5 0.2 0.2\n0 0.5 0.5 0.2\n"
        with pytest.raises(ParseError, match="line 2"):
            parse_yolo_gt(content, "a")

    def test_blank_lines_keep_numbering(self):
        content = "0 0.5 0.5 0.2 0.2\n\nnot a record\n"
        with pytest.raises(ParseError, match="line 3"):
            parse_yolo_gt(content, "a")

    def test_error_names_path(self):
        with pytest.raises(ParseError, match="labels/a.txt"):
            parse_yolo_gt("junk", "a", path="labels/a.txt")

    @given(st.lists(gt_records(), max_size=8))
    def test_round_trip_within_1e6(self, records):
        reparsed = parse_yolo_gt(write_yolo_gt(records), "img")
        assert len(reparsed) == len(records)
        for a, b in zip(records, reparsed):
            assert a.class_id == b.class_id
            for f in ("cx", "cy", "w", "h"):
                assert math.isclose(getattr(a.box, f), getattr(b.box, f), abs_tol=1e-6)


class TestDetectionsIO:
    def test_parse_single(self):
        line = (
            '{"image_id": "a", "class_id": 0, "cx": 0.5, "cy": 0.5,'
            ' "w": 0.2, "h": 0.1, "confidence": 0.9}'
        )
        (d,) = parse_detections(line)
        assert d == det("a", cx=0.5, cy=0.5, w=0.2, h=0.1, conf=0.9)

    def test_round_trip_exact(self):
        dets = [det("a", cx=1 / 3, conf=0.875), det("b", cx=0.1234567, conf=0.5)]
        assert parse_detections(write_detections(dets)) == dets

    def test_write_empty(self):
        assert write_detections([]) == ""

    def test_strict_rejects_comment(self):
        with pytest.raises(ParseError, match="comment"):
            parse_detections("# produced by exporter v3\n", strict=True)

    def test_lenient_skips_comment(self):
        assert parse_detections("# metadata\n", strict=False) == []

    def test_strict_rejects_unknown_field(self):
        line = det("a").to_json_line()[:-1] + ', "score_raw": 3.2}'
        with pytest.raises(ParseError, match="score_raw"):
            parse_detections(line, strict=True)

    def test_lenient_warns_on_unknown_field(self, caplog):
        line = det("a").to_json_line()[:-1] + ', "score_raw": 3.2}'
        with caplog.at_level(logging.WARNING, logger="loggauge.annot_io"):
            (d,) = parse_detections(line, strict=False)
        assert d.box == det("a").box
        assert any("score_raw" in r.message for r in caplog.records)

    def test_missing_field_named(self):
        line = '{"image_id": "a", "class_id": 0, "cx": 0.5, "cy": 0.5, "w": 0.2}'
        with pytest.raises(ParseError, match="h, confidence"):
            parse_detections(line)

    def test_invalid_json_names_line(self):
        content = det("a").to_json_line() + "\n{broken\n"
        with pytest.raises(ParseError, match="line 2"):
            parse_detections(content)

    def test_non_object_line(self):
        with pytest.raises(ParseError, match="object"):
            parse_detections("[1, 2, 3]")

    @pytest.mark.parametrize("conf", [-0.1, 1.5])
    def test_confidence_out_of_range(self, conf):
        line = json.dumps(
            dict(image_id="a", class_id=0, cx=0.5, cy=0.5, w=0.2, h=0.2, confidence=conf)
        )
        with pytest.raises(ParseError, match="confidence"):
            parse_detections(line)

    def test_image_id_must_be_string(self):
        line = json.dumps(
            dict(image_id=7, class_id=0, cx=0.5, cy=0.5, w=0.2, h=0.2, confidence=0.9)
        )
        with pytest.raises(ParseError, match="image_id"):
            parse_detections(line)

    def test_blank_lines_ignored(self):
        content = "\n" + det("a").to_json_line() + "\n\n"
        assert len(parse_detections(content)) == 1


def coco_doc(images, annotations):
    return json.dumps({"images": images, "annotations": annotations})


class TestCocoParse:
    def test_bbox_normalization(self):
        doc = coco_doc(
            [{"id": 1, "file_name": "a.jpg", "width": 100, "height": 100}],
            [{"id": 1, "image_id": 1, "category_id": 0, "bbox": [10, 20, 30, 40]}],
        )
        ds = parse_coco_dataset(doc)
        (rec,) = ds.gt_for("a")
        assert rec.box == NormBox(0.25, 0.40, 0.30, 0.40)

    def test_image_id_from_file_name_stem(self):
        doc = coco_doc(
            [{"id": 42, "file_name": "shots/IMG_0042.JPG", "width": 10, "height": 10}], []
        )
        ds = parse_coco_dataset(doc)
        assert ds.manifest.image_ids() == ["IMG_0042"]

    def test_image_id_falls_back_to_numeric_id(self):
        doc = coco_doc([{"id": 42, "width": 10, "height": 10}], [])
        assert parse_coco_dataset(doc).manifest.image_ids() == ["42"]

    def test_polygon_only_box_matches_point_bounds(self):
        poly = [12.0, 30.0, 55.5, 14.0, 80.0, 62.0, 20.0, 71.0]
        doc = coco_doc(
            [{"id": 1, "file_name": "a.jpg", "width": 100, "height": 100}],
            [{"id": 1, "image_id": 1, "category_id": 0, "segmentation": [poly]}],
        )
        (rec,) = parse_coco_dataset(doc).gt_for("a")
        x_min, y_min, x_max, y_max = MultiPoint(
            list(zip(poly[0::2], poly[1::2]))
        ).bounds
        assert rec.box.cx == pytest.approx((x_min + x_max) / 2 / 100)
        assert rec.box.cy == pytest.approx((y_min + y_max) / 2 / 100)
        assert rec.box.w == pytest.approx((x_max - x_min) / 100)
        assert rec.box.h == pytest.approx((y_max - y_min) / 100)

    def test_multi_polygon_union(self):
        # one log occluded into two fragments is still a single instance
        left = [0.0, 10.0, 20.0, 10.0, 20.0, 30.0, 0.0, 30.0]
        right = [60.0, 12.0, 90.0, 12.0, 90.0, 28.0, 60.0, 28.0]
        doc = coco_doc(
            [{"id": 1, "file_name": "a.jpg", "width": 100, "height": 100}],
            [{"id": 1, "image_id": 1, "segmentation": [left, right]}],
        )
        (rec,) = parse_coco_dataset(doc).gt_for("a")
        assert rec.box.w == pytest.approx(0.90)
        assert rec.box.cx == pytest.approx(0.45)

    def test_bbox_preferred_over_segmentation(self):
        doc = coco_doc(
            [{"id": 1, "file_name": "a.jpg", "width": 100, "height": 100}],
            [
                {
                    "id": 1,
                    "image_id": 1,
                    "bbox": [10, 10, 10, 10],
                    "segmentation": [[0.0, 0.0, 50.0, 0.0, 50.0, 50.0]],
                }
            ],
        )
        (rec,) = parse_coco_dataset(doc).gt_for("a")
        assert rec.box.w == pytest.approx(0.10)

    def test_default_category_is_zero(self):
        doc = coco_doc(
            [{"id": 1, "file_name": "a.jpg", "width": 100, "height": 100}],
            [{"id": 1, "image_id": 1, "bbox": [10, 10, 10, 10]}],
        )
        (rec,) = parse_coco_dataset(doc).gt_for("a")
        assert rec.class_id == 0

    @pytest.mark.parametrize(
        "ann,fragment",
        [
            ({"id": 1, "image_id": 1}, "annotations\\[1\\]"),
            ({"id": 1, "image_id": 99, "bbox": [1, 1, 1, 1]}, "unknown image"),
            ({"id": 1, "image_id": 1, "bbox": [1, 1, 0, 1]}, "positive"),
            ({"id": 1, "image_id": 1, "bbox": [1, 1, 1]}, "bbox"),
            ({"id": 1, "image_id": 1, "segmentation": [[1.0, 2.0, 3.0]]}, "polygon"),
        ],
    )
    def test_bad_annotation_named(self, ann, fragment):
        doc = coco_doc([{"id": 1, "file_name": "a.jpg", "width": 10, "height": 10}], [ann])
        with pytest.raises(ParseError, match=fragment):
            parse_coco_dataset(doc)

    def test_duplicate_image_id_rejected(self):
        doc = coco_doc(
            [
                {"id": 1, "file_name": "a.jpg", "width": 10, "height": 10},
                {"id": 1, "file_name": "b.jpg", "width": 10, "height": 10},
            ],
            [],
        )
        with pytest.raises(ParseError, match="duplicate"):
            parse_coco_dataset(doc)

    def test_not_coco_shaped(self):
        with pytest.raises(ParseError, match="images"):
            parse_coco_dataset("{}")


class TestManifest:
    def write_fixture(self, tmp_path, gt_lines=("0 0.5 0.5 0.2 0.2",)):
        labels = tmp_path / "labels"
        labels.mkdir()
        (labels / "a.txt").write_text("\n".join(gt_lines) + "\n")
        manifest = [{"image_id": "a", "width": 640, "height": 480, "gt": "labels/a.txt"}]
        mpath = tmp_path / "manifest.json"
        mpath.write_text(json.dumps(manifest))
        return mpath

    def test_load_and_resolve(self, tmp_path):
        manifest = load_manifest_file(self.write_fixture(tmp_path))
        entry = manifest.entry("a")
        assert entry.dims.width == 640
        assert entry.gt_path == tmp_path / "labels" / "a.txt"

    def test_load_dataset_reads_gt(self, tmp_path):
        ds = load_dataset(load_manifest_file(self.write_fixture(tmp_path)))
        assert ds.num_instances == 1
        assert ds.gt_for("a")[0].box.cx == 0.5

    def test_gt_optional_for_dims_only_manifest(self):
        content = json.dumps([{"image_id": "a", "width": 100, "height": 100}])
        manifest = load_manifest(content, ".")
        assert manifest.entry("a").gt_path is None
        with pytest.raises(UsageError, match="'a'"):
            load_dataset(manifest)

    def test_missing_gt_file_rejected(self, tmp_path):
        content = json.dumps(
            [{"image_id": "a", "width": 100, "height": 100, "gt": "labels/missing.txt"}]
        )
        with pytest.raises(ParseError, match="missing.txt"):
            load_manifest(content, tmp_path)

    def test_duplicate_image_id_rejected(self):
        content = json.dumps(
            [
                {"image_id": "a", "width": 10, "height": 10},
                {"image_id": "a", "width": 20, "height": 20},
            ]
        )
        with pytest.raises(ParseError, match="duplicate"):
            load_manifest(content, ".")

    @pytest.mark.parametrize(
        "entry",
        [
            {"image_id": "a", "width": 10.5, "height": 10},
            {"image_id": "a", "width": "10", "height": 10},
            {"image_id": "a", "height": 10},
            {"image_id": "a", "width": 0, "height": 10},
            {"image_id": "", "width": 10, "height": 10},
            {"width": 10, "height": 10},
        ],
    )
    def test_bad_entry_rejected(self, entry):
        with pytest.raises(ParseError):
            load_manifest(json.dumps([entry]), ".")

    def test_not_an_array(self):
        with pytest.raises(ParseError, match="array"):
            load_manifest("{}", ".")

    def test_order_preserved(self):
        content = json.dumps(
            [{"image_id": i, "width": 10, "height": 10} for i in ("c", "a", "b")]
        )
        assert load_manifest(content, ".").image_ids() == ["c", "a", "b"]

    def test_json_render_round_trip(self, tmp_path):
        manifest = load_manifest_file(self.write_fixture(tmp_path))
        rendered = manifest_to_json(manifest, tmp_path)
        again = load_manifest(rendered, tmp_path)
        assert again.entries == manifest.entries


class TestCocoRoundTrip:
    def test_yolo_to_coco_to_yolo(self, tmp_path):
        self_manifest = TestManifest().write_fixture(
            tmp_path, gt_lines=("0 0.5 0.5 0.2 0.2", "1 0.25 0.75 0.1 0.3")
        )
        ds = load_dataset(load_manifest_file(self_manifest))
        coco = dataset_to_coco_dict(ds)
        assert {c["id"] for c in coco["categories"]} == {0, 1}
        assert coco["categories"][0]["name"] == "wood"
        back = parse_coco_dataset(json.dumps(coco))
        for image_id in ds.manifest.image_ids():
            orig, re = ds.gt_for(image_id), back.gt_for(image_id)
            assert len(orig) == len(re)
            for a, b in zip(orig, re):
                assert a.class_id == b.class_id
                for f in ("cx", "cy", "w", "h"):
                    assert math.isclose(
                        getattr(a.box, f), getattr(b.box, f), abs_tol=1e-9
                    )


class TestRecordValidation:
    def test_bool_class_rejected(self):
        with pytest.raises(ParseError):
            GroundTruth(image_id="a", class_id=True, box=NormBox(0.5, 0.5, 0.2, 0.2))

    def test_negative_class_rejected(self):
        with pytest.raises(ParseError):
            det("a", class_id=-1)

    def test_nan_confidence_rejected(self):
        with pytest.raises(ParseError):
            Detection("a", 0, NormBox(0.5, 0.5, 0.2, 0.2), float("nan"))

    def test_dataset_rejects_unlisted_image(self):
        from conftest import dataset_from
        from loggauge.errors import UnknownImageError
        from loggauge.geometry import ImageDims

        ds = dataset_from([], {"a": ImageDims(10, 10)})
        with pytest.raises(UnknownImageError):
            Dataset(manifest=ds.manifest, ground_truth={"b": (gt("b"),)})
