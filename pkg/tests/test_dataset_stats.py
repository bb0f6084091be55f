import pytest

from conftest import dataset_from, gt
from loggauge.dataset_stats import compute_stats, format_stats_table
from loggauge.errors import EvalError
from loggauge.geometry import ImageDims
from loggauge.synth import make_dataset


class TestComputeStats:
    def test_counts_and_per_image_average(self):
        # 440 images, 10,735 instances: the average must print as 24.40
        dims = {f"i{n:03d}": ImageDims(100, 100) for n in range(440)}
        records = []
        for n, image_id in enumerate(dims):
            for _ in range(25 if n < 175 else 24):
                records.append(gt(image_id))
        ds = dataset_from(records, dims)
        stats = compute_stats(ds)
        assert stats.num_images == 440
        assert stats.num_instances == 10735
        assert stats.avg_per_image == pytest.approx(10735 / 440)
        table = format_stats_table(stats)
        assert "Total Images                   440" in table.replace("  ", " " * 2)
        assert "10,735" in table
        assert "24.40" in table

    def test_extent_ranges_use_original_pixels(self):
        dims = {"tiny": ImageDims(100, 100), "big": ImageDims(4608, 3456)}
        records = [
            gt("tiny", cx=0.5, cy=0.5, w=0.02, h=0.04),
            gt("big", cx=0.5, cy=0.5, w=1.0, h=1.0),
        ]
        stats = compute_stats(dataset_from(records, dims))
        assert stats.width_range_px == (2.0, 4608.0)
        assert stats.height_range_px == (4.0, 3456.0)
        table = format_stats_table(stats)
        assert "2 px to 4,608 px" in table
        assert "4 px to 3,456 px" in table

    def test_full_frame_box_is_hundred_percent(self):
        ds = dataset_from(
            [gt("a", cx=0.5, cy=0.5, w=1.0, h=1.0)], {"a": ImageDims(640, 480)}
        )
        stats = compute_stats(ds)
        assert stats.avg_area_pct == pytest.approx(100.0)
        assert stats.area_pct_range == (pytest.approx(100.0), pytest.approx(100.0))

    def test_two_area_conventions(self):
        # A: one box at 10%; B: two boxes at 40% each
        dims = {"a": ImageDims(100, 100), "b": ImageDims(100, 100)}
        records = [
            gt("a", cx=0.5, cy=0.5, w=0.25, h=0.4),       # 10%
            gt("b", cx=0.3, cy=0.5, w=0.5, h=0.8),        # 40%
            gt("b", cx=0.7, cy=0.5, w=0.5, h=0.8),        # 40%
        ]
        stats = compute_stats(dataset_from(records, dims))
        assert stats.avg_area_pct == pytest.approx(30.0)
        assert stats.avg_area_pct_by_image == pytest.approx(25.0)

    def test_unannotated_images_still_counted_but_skip_by_image_mean(self):
        dims = {"a": ImageDims(100, 100), "empty": ImageDims(100, 100)}
        records = [gt("a", cx=0.5, cy=0.5, w=0.25, h=0.4)]
        stats = compute_stats(dataset_from(records, dims))
        assert stats.num_images == 2
        assert stats.avg_per_image == pytest.approx(0.5)
        assert stats.avg_area_pct_by_image == pytest.approx(10.0)

    def test_per_class_counts(self):
        dims = {"a": ImageDims(100, 100)}
        records = [gt("a"), gt("a", class_id=2), gt("a", class_id=2)]
        stats = compute_stats(dataset_from(records, dims))
        assert stats.per_class_counts == {0: 1, 2: 2}
        assert sum(stats.per_class_counts.values()) == stats.num_instances

    def test_invariants_on_random_dataset(self, rng):
        stats = compute_stats(make_dataset(rng, n_images=6, max_boxes=8, min_boxes=1))
        assert stats.width_range_px[0] <= stats.width_range_px[1]
        assert stats.height_range_px[0] <= stats.height_range_px[1]
        assert stats.area_pct_range[0] <= stats.avg_area_pct <= stats.area_pct_range[1]
        assert 0.0 < stats.avg_area_pct <= 100.0
        assert sum(stats.per_class_counts.values()) == stats.num_instances

    def test_no_images_rejected(self):
        with pytest.raises(EvalError, match="no images"):
            compute_stats(dataset_from([], {}))

    def test_no_instances_rejected(self):
        with pytest.raises(EvalError, match="no annotated instances"):
            compute_stats(dataset_from([], {"a": ImageDims(100, 100)}))

    def test_to_dict_shapes(self, rng):
        d = compute_stats(make_dataset(rng, n_images=3, max_boxes=4, min_boxes=1)).to_dict()
        assert set(d) == {
            "num_images",
            "num_instances",
            "avg_per_image",
            "avg_area_pct",
            "avg_area_pct_by_image",
            "area_pct_range",
            "width_range_px",
            "height_range_px",
            "per_class_counts",
        }
        assert all(isinstance(k, str) for k in d["per_class_counts"])
        assert len(d["area_pct_range"]) == 2


class TestFormatTable:
    def test_all_rows_present(self, rng):
        table = format_stats_table(
            compute_stats(make_dataset(rng, n_images=3, max_boxes=4, min_boxes=1))
        )
        for label in (
            "Total Images",
            "Total Annotated Log Instances",
            "Average Logs per Image",
            "Number of Classes",
            "Average Object Area",
            "Object Area Range",
            "Object Width Range",
            "Object Height Range",
        ):
            assert label in table
        assert table.endswith("\n")
        assert "% of image area" in table
