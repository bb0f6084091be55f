"""Confidence filtering and greedy non-maximum suppression.

Raw detector output is filtered by a confidence floor and then pruned by
per-class greedy NMS in pixel space before binning and evaluation. The
defaults (confidence 0.25, NMS IoU 0.45) are the upstream detector
family's published defaults; both are plain configuration and every
evaluation report records the values used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .annot_io import DatasetManifest, Detection
from .errors import UsageError
from .geometry import ImageDims, iou, norm_to_pixel


@dataclass(frozen=True)
class PostprocessParams:
    conf_threshold: float = 0.25
    nms_iou_threshold: float = 0.45

    def __post_init__(self):
        for name in ("conf_threshold", "nms_iou_threshold"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise UsageError(f"{name} must be a finite number, got {v!r}")
            if not 0.0 <= v <= 1.0:
                raise UsageError(f"{name} must be in [0, 1], got {v}")


def filter_confidence(dets: Sequence[Detection], conf_threshold: float) -> list[Detection]:
    """Detections with confidence >= the threshold, input order preserved."""
    if not 0.0 <= conf_threshold <= 1.0:
        raise UsageError(f"conf_threshold must be in [0, 1], got {conf_threshold}")
    return [d for d in dets if d.confidence >= conf_threshold]


def greedy_nms(
    dets: Sequence[Detection], dims: ImageDims, iou_threshold: float
) -> list[Detection]:
    """Greedy NMS over one image's detections.

    Detections are visited in descending confidence (ties by input index);
    a detection is kept iff its IoU with every already-kept detection of
    the same class is at most ``iou_threshold``. The result is in visit
    order, i.e. descending confidence.
    """
    if not 0.0 <= iou_threshold <= 1.0:
        raise UsageError(f"iou_threshold must be in [0, 1], got {iou_threshold}")
    if len({d.image_id for d in dets}) > 1:
        raise UsageError("greedy_nms expects detections from a single image")
    boxes = [norm_to_pixel(d.box, dims) for d in dets]
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].confidence, i))
    kept: list[int] = []
    for i in order:
        if all(
            dets[j].class_id != dets[i].class_id or iou(boxes[i], boxes[j]) <= iou_threshold
            for j in kept
        ):
            kept.append(i)
    return [dets[i] for i in kept]


def group_by_image(dets: Sequence[Detection]) -> dict[str, list[Detection]]:
    """Group detections by image id, preserving per-image input order."""
    grouped: dict[str, list[Detection]] = {}
    for d in dets:
        grouped.setdefault(d.image_id, []).append(d)
    return grouped


def postprocess_detections(
    dets: Sequence[Detection],
    manifest: DatasetManifest,
    params: PostprocessParams = PostprocessParams(),
) -> list[Detection]:
    """Filter and NMS all detections, per image.

    Output is in canonical order: images sorted by id, then descending
    confidence within each image. Every detection's image id must be in
    the manifest.
    """
    grouped = group_by_image(dets)
    out: list[Detection] = []
    for image_id in sorted(grouped):
        dims = manifest.dims(image_id)
        survivors = filter_confidence(grouped[image_id], params.conf_threshold)
        out.extend(greedy_nms(survivors, dims, params.nms_iou_threshold))
    return out
