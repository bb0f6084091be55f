"""Diameter categories from bounding-box width, and bin agreement scoring.

A log's diameter category is read off its box width in original-image
pixels: Thin below ``thin_max``, Medium from ``thin_max`` to ``medium_max``
inclusive, Thick above. The default thresholds are 30 and 60 px. Both
boundary widths land in Medium; that is the only reading consistent with
the range labels "<30", "30-60", ">60", and alternate readings can be
configured by moving the thresholds.

Ground-truth bins are derived from ground-truth box widths with the same
thresholds, since the corpus carries no independent diameter labels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .annot_io import DatasetManifest, Detection, GroundTruth
from .errors import BoxError


class DiameterBin(enum.IntEnum):
    """Three-way log thickness category, ordered Thin < Medium < Thick."""

    THIN = 0
    MEDIUM = 1
    THICK = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class BinThresholds:
    """Bin boundaries in pixels: Thin < thin_max <= Medium <= medium_max < Thick."""

    thin_max: float = 30.0
    medium_max: float = 60.0

    def __post_init__(self):
        if not (math.isfinite(self.thin_max) and math.isfinite(self.medium_max)):
            raise BoxError("bin thresholds must be finite")
        if not 0 < self.thin_max <= self.medium_max:
            raise BoxError(
                f"need 0 < thin_max <= medium_max, got {self.thin_max}, {self.medium_max}"
            )


@dataclass(frozen=True)
class BinReport:
    """Histogram of detection bins, ground-truth/detection bin confusion,
    and the diagonal fraction.

    ``confusion`` rows are ground-truth bins, columns detection bins, both
    indexed by ``DiameterBin`` value. ``bin_accuracy`` is None (undefined,
    distinct from 0) when there are no matched pairs to score.
    """

    histogram: dict[DiameterBin, int]
    confusion: tuple[tuple[int, int, int], ...]
    bin_accuracy: float | None

    def to_dict(self) -> dict:
        return {
            "histogram": {b.label: self.histogram.get(b, 0) for b in DiameterBin},
            "confusion": {
                gt_bin.label: {
                    det_bin.label: self.confusion[gt_bin][det_bin] for det_bin in DiameterBin
                }
                for gt_bin in DiameterBin
            },
            "bin_accuracy": self.bin_accuracy,
        }


def assign_bin(width_px: float, thresholds: BinThresholds = BinThresholds()) -> DiameterBin:
    """Map a box width in pixels to its diameter bin."""
    if not isinstance(width_px, (int, float)) or isinstance(width_px, bool):
        raise BoxError(f"width must be a number, got {width_px!r}")
    if not math.isfinite(width_px) or width_px < 0:
        raise BoxError(f"width must be finite and non-negative, got {width_px!r}")
    if width_px < thresholds.thin_max:
        return DiameterBin.THIN
    if width_px <= thresholds.medium_max:
        return DiameterBin.MEDIUM
    return DiameterBin.THICK


def detection_width_px(det: Detection, manifest: DatasetManifest) -> float:
    """Box width of a detection in original-image pixels."""
    return det.box.w * manifest.dims(det.image_id).width


def bin_detections(
    dets: Sequence[Detection],
    manifest: DatasetManifest,
    thresholds: BinThresholds = BinThresholds(),
) -> list[tuple[Detection, DiameterBin]]:
    """Pair each detection with its diameter bin, preserving input order."""
    return [
        (det, assign_bin(detection_width_px(det, manifest), thresholds)) for det in dets
    ]


def histogram(bins: Sequence[DiameterBin]) -> dict[DiameterBin, int]:
    counts = {b: 0 for b in DiameterBin}
    for b in bins:
        counts[b] += 1
    return counts


def bin_confusion(
    pairs: Sequence[tuple[GroundTruth, Detection]],
    manifest: DatasetManifest,
    thresholds: BinThresholds = BinThresholds(),
) -> BinReport:
    """Score bin agreement over matched (ground truth, detection) pairs.

    Row = bin of the ground-truth box width, column = bin of the detection
    box width, both in the image's original pixel space.
    """
    table = [[0, 0, 0] for _ in DiameterBin]
    det_bins = []
    for gt, det in pairs:
        dims = manifest.dims(gt.image_id)
        gt_bin = assign_bin(gt.box.w * dims.width, thresholds)
        det_bin = assign_bin(det.box.w * manifest.dims(det.image_id).width, thresholds)
        table[gt_bin][det_bin] += 1
        det_bins.append(det_bin)
    total = len(det_bins)
    accuracy = None
    if total > 0:
        accuracy = sum(table[b][b] for b in DiameterBin) / total
    return BinReport(
        histogram=histogram(det_bins),
        confusion=tuple(tuple(row) for row in table),
        bin_accuracy=accuracy,
    )
