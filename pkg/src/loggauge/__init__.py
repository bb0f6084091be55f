"""Timber-log detection evaluation toolkit.

Parsing for YOLO/COCO annotations and interchange detections, confidence
filtering and NMS, bounding-box-width diameter binning, detection metrics
(precision/recall, mAP@0.5, mAP@0.5:0.95, bin accuracy), and dataset
statistics, plus the ``loggauge`` CLI.
"""

from .annot_io import (
    Dataset,
    DatasetManifest,
    Detection,
    GroundTruth,
    ManifestEntry,
    parse_coco_dataset,
    parse_detections,
    parse_yolo_gt,
    write_detections,
    write_yolo_gt,
)
from .binning import BinReport, BinThresholds, DiameterBin, assign_bin, bin_confusion, bin_detections
from .dataset_stats import DatasetStats, compute_stats
from .errors import (
    BoxError,
    EvalError,
    LogGaugeError,
    ParseError,
    UnknownImageError,
    UsageError,
)
from .geometry import ImageDims, NormBox, PixelBox, iou, norm_to_pixel, pixel_to_norm, polygon_bbox
from .metrics import (
    COCO_IOU_THRESHOLDS,
    EvalReport,
    MatchSet,
    PRPoint,
    average_precision,
    evaluate,
    match_image,
    max_f1_point,
    pr_sweep,
)
from .postprocess import PostprocessParams, filter_confidence, greedy_nms, postprocess_detections

__version__ = "0.1.0"

__all__ = [
    "BinReport",
    "BinThresholds",
    "BoxError",
    "COCO_IOU_THRESHOLDS",
    "Dataset",
    "DatasetManifest",
    "DatasetStats",
    "Detection",
    "DiameterBin",
    "EvalError",
    "EvalReport",
    "GroundTruth",
    "ImageDims",
    "LogGaugeError",
    "ManifestEntry",
    "MatchSet",
    "NormBox",
    "PRPoint",
    "ParseError",
    "PixelBox",
    "PostprocessParams",
    "UnknownImageError",
    "UsageError",
    "assign_bin",
    "average_precision",
    "bin_confusion",
    "bin_detections",
    "compute_stats",
    "evaluate",
    "filter_confidence",
    "greedy_nms",
    "iou",
    "match_image",
    "max_f1_point",
    "norm_to_pixel",
    "parse_coco_dataset",
    "parse_detections",
    "parse_yolo_gt",
    "pixel_to_norm",
    "polygon_bbox",
    "postprocess_detections",
    "pr_sweep",
    "write_detections",
    "write_yolo_gt",
]
