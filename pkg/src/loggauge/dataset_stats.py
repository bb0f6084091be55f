"""Dataset-level summary statistics computed straight from annotations.

Mirrors the usual corpus overview table: image and instance counts,
instances per image, object area as a percent of image area, and pixel
extent ranges. Area percent is averaged two ways, because corpus tables
rarely say which convention they used: unweighted over all instances, and
per-image means averaged over images (images with zero instances are
skipped in the latter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annot_io import Dataset
from .errors import EvalError
from .geometry import norm_to_pixel


@dataclass(frozen=True)
class DatasetStats:
    num_images: int
    num_instances: int
    avg_per_image: float
    avg_area_pct: float
    avg_area_pct_by_image: float
    area_pct_range: tuple[float, float]
    width_range_px: tuple[float, float]
    height_range_px: tuple[float, float]
    per_class_counts: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "num_images": self.num_images,
            "num_instances": self.num_instances,
            "avg_per_image": self.avg_per_image,
            "avg_area_pct": self.avg_area_pct,
            "avg_area_pct_by_image": self.avg_area_pct_by_image,
            "area_pct_range": list(self.area_pct_range),
            "width_range_px": list(self.width_range_px),
            "height_range_px": list(self.height_range_px),
            "per_class_counts": {str(k): v for k, v in sorted(self.per_class_counts.items())},
        }


def compute_stats(dataset: Dataset) -> DatasetStats:
    """Aggregate instance measurements over the whole dataset.

    Widths, heights, and areas are measured in original-image pixels via
    the same normalized-to-pixel conversion the rest of the toolkit uses.
    """
    entries = dataset.manifest.entries
    if not entries:
        raise EvalError("empty dataset: no images")

    widths: list[float] = []
    heights: list[float] = []
    area_pcts: list[float] = []
    per_image_mean_pcts: list[float] = []
    per_class: dict[int, int] = {}
    for entry in entries:
        dims = entry.dims
        image_area = dims.width * dims.height
        image_pcts = []
        for gt in dataset.gt_for(entry.image_id):
            p = norm_to_pixel(gt.box, dims)
            widths.append(p.width)
            heights.append(p.height)
            pct = 100.0 * p.area / image_area
            area_pcts.append(pct)
            image_pcts.append(pct)
            per_class[gt.class_id] = per_class.get(gt.class_id, 0) + 1
        if image_pcts:
            per_image_mean_pcts.append(float(np.mean(image_pcts)))

    if not widths:
        raise EvalError("empty dataset: no annotated instances")

    num_images = len(entries)
    num_instances = len(widths)
    return DatasetStats(
        num_images=num_images,
        num_instances=num_instances,
        avg_per_image=num_instances / num_images,
        avg_area_pct=float(np.mean(area_pcts)),
        avg_area_pct_by_image=float(np.mean(per_image_mean_pcts)),
        area_pct_range=(min(area_pcts), max(area_pcts)),
        width_range_px=(min(widths), max(widths)),
        height_range_px=(min(heights), max(heights)),
        per_class_counts=per_class,
    )


def format_stats_table(stats: DatasetStats) -> str:
    """Two-column text table of the summary, ranges rounded to integers."""
    rows = [
        ("Total Images", f"{stats.num_images:,}"),
        ("Total Annotated Log Instances", f"{stats.num_instances:,}"),
        ("Average Logs per Image", f"{stats.avg_per_image:.2f}"),
        ("Number of Classes", f"{len(stats.per_class_counts)}"),
        (
            "Average Object Area",
            f"{stats.avg_area_pct:.2f}% of image area "
            f"({stats.avg_area_pct_by_image:.2f}% averaged per image)",
        ),
        (
            "Object Area Range",
            f"{stats.area_pct_range[0]:.2f}% to {stats.area_pct_range[1]:.2f}% of image area",
        ),
        (
            "Object Width Range",
            f"{round(stats.width_range_px[0]):,} px to {round(stats.width_range_px[1]):,} px",
        ),
        (
            "Object Height Range",
            f"{round(stats.height_range_px[0]):,} px to {round(stats.height_range_px[1]):,} px",
        ),
    ]
    label_width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label:<{label_width}}  {value}" for label, value in rows) + "\n"
