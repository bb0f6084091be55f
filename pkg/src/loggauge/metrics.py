"""Detection evaluation: IoU matching, PR curves, AP, and report assembly.

The protocol, in order:

1. Per image, match detections to ground truth greedily: visit detections
   in descending confidence; each takes the unmatched same-class ground
   truth of maximal IoU, provided that IoU clears the threshold.
2. Pool every detection's true/false-positive verdict across images, sort
   by descending confidence (ties: image id, then input index), and
   accumulate a precision/recall point per detection.
3. Summarize a curve as 101-point interpolated AP: the mean over recall
   grid {0.00, 0.01, ..., 1.00} of the best precision achieved at or
   beyond each recall. An all-point (area under the precision envelope)
   mode exists for comparing against toolkits that integrate exactly.

``evaluate`` runs the sweep at IoU thresholds 0.50:0.05:0.95, reports
mAP@0.5 and mAP@0.5:0.95, picks the single precision/recall operating
point by maximum F1 (the chosen confidence is recorded in the report),
and scores diameter-bin agreement over the matched pairs at the main
threshold. Single-class data makes mAP equal AP; the matcher still
compares class ids so multi-class corpora evaluate per class.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .annot_io import Dataset, Detection, GroundTruth
from .binning import BinReport, BinThresholds, bin_confusion
from .errors import EvalError, UnknownImageError, UsageError
from .geometry import ImageDims, iou, norm_to_pixel
from .postprocess import PostprocessParams, group_by_image, postprocess_detections

#: The ten IoU thresholds underlying mAP@0.5:0.95.
COCO_IOU_THRESHOLDS = tuple((50 + 5 * i) / 100 for i in range(10))

#: Recall grid for 101-point interpolated AP.
RECALL_GRID = tuple(i / 100 for i in range(101))

AP_METHODS = ("101point", "continuous")


@dataclass(frozen=True)
class MatchedPair:
    gt: GroundTruth
    det: Detection
    iou: float


@dataclass(frozen=True)
class MatchSet:
    """Outcome of matching one image at one IoU threshold.

    ``pairs`` holds true positives in match (descending-confidence) order,
    ``fp`` unmatched detections in the same order, ``fn`` unmatched ground
    truths in input order. ``tp_flags`` carries the per-detection verdicts
    aligned with the *input* detection order, which the pooled sweep needs.
    """

    pairs: tuple[MatchedPair, ...]
    fp: tuple[Detection, ...]
    fn: tuple[GroundTruth, ...]
    iou_threshold: float
    tp_flags: tuple[bool, ...]


@dataclass(frozen=True)
class PRPoint:
    confidence: float
    cum_tp: int
    cum_fp: int
    precision: float
    recall: float


@dataclass(frozen=True)
class MaxF1Point:
    confidence: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    conf_at_max_f1: float | None
    ap_per_iou: Mapping[float, float]
    map50: float
    map5095: float
    bin_report: BinReport
    params: PostprocessParams
    counts: Mapping[str, int]
    postprocess_applied: bool
    ap_method: str
    undefined: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "conf_at_max_f1": self.conf_at_max_f1,
            "ap_per_iou": {f"{t:.2f}": ap for t, ap in sorted(self.ap_per_iou.items())},
            "map50": self.map50,
            "map5095": self.map5095,
            "bin_report": self.bin_report.to_dict(),
            "params": {
                "conf_threshold": self.params.conf_threshold,
                "nms_iou_threshold": self.params.nms_iou_threshold,
                "applied": self.postprocess_applied,
            },
            "counts": dict(self.counts),
            "ap_method": self.ap_method,
            "undefined": list(self.undefined),
        }


def match_image(
    gts: Sequence[GroundTruth],
    dets: Sequence[Detection],
    dims: ImageDims,
    iou_threshold: float,
) -> MatchSet:
    """Greedily match one image's detections against its ground truth.

    Detections are processed in descending confidence (ties by input
    index, lower first). Each takes the not-yet-matched ground truth of
    the same class with maximal IoU if that IoU is >= the threshold; IoU
    ties go to the lower ground-truth index.
    """
    gt_boxes = [norm_to_pixel(g.box, dims) for g in gts]
    det_boxes = [norm_to_pixel(d.box, dims) for d in dets]
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].confidence, i))

    taken: set[int] = set()
    tp_flags = [False] * len(dets)
    pairs: list[MatchedPair] = []
    fp: list[Detection] = []
    for di in order:
        det = dets[di]
        best_gi = -1
        best_iou = 0.0
        for gi, gt in enumerate(gts):
            if gi in taken or gt.class_id != det.class_id:
                continue
            v = iou(gt_boxes[gi], det_boxes[di])
            if v >= iou_threshold and v > best_iou:
                best_gi, best_iou = gi, v
        if best_gi >= 0 and best_iou >= iou_threshold:
            taken.add(best_gi)
            tp_flags[di] = True
            pairs.append(MatchedPair(gt=gts[best_gi], det=det, iou=best_iou))
        else:
            fp.append(det)
    fn = tuple(g for gi, g in enumerate(gts) if gi not in taken)
    return MatchSet(
        pairs=tuple(pairs),
        fp=tuple(fp),
        fn=fn,
        iou_threshold=iou_threshold,
        tp_flags=tuple(tp_flags),
    )


def pr_sweep(
    per_image: Sequence[tuple[str, Sequence[Detection], MatchSet]],
    num_gt: int,
) -> list[PRPoint]:
    """Pool per-image verdicts into a cumulative precision/recall curve.

    One point per detection, in descending confidence; ties broken by
    image id (lexicographic) then input index, making the sweep
    independent of the order images are supplied in.
    """
    if num_gt <= 0:
        raise EvalError("recall is undefined: ground-truth corpus is empty")
    records = []
    for image_id, dets, mset in per_image:
        for idx, (det, is_tp) in enumerate(zip(dets, mset.tp_flags)):
            records.append((-det.confidence, image_id, idx, is_tp))
    records.sort(key=lambda r: (r[0], r[1], r[2]))
    points = []
    cum_tp = cum_fp = 0
    for neg_conf, _image_id, _idx, is_tp in records:
        if is_tp:
            cum_tp += 1
        else:
            cum_fp += 1
        points.append(
            PRPoint(
                confidence=-neg_conf,
                cum_tp=cum_tp,
                cum_fp=cum_fp,
                precision=cum_tp / (cum_tp + cum_fp),
                recall=cum_tp / num_gt,
            )
        )
    return points


def average_precision(curve: Sequence[PRPoint], method: str = "101point") -> float:
    """Summarize a PR curve as average precision.

    ``101point`` (the default): mean over the 101 recall grid values of
    the precision envelope (max precision over all points at or beyond
    each recall; 0 where no point reaches it). ``continuous``: exact area
    under the same envelope.
    """
    if method not in AP_METHODS:
        raise UsageError(f"ap method must be one of {AP_METHODS}, got {method!r}")
    if not curve:
        return 0.0
    recalls = [p.recall for p in curve]
    envelope = np.maximum.accumulate([p.precision for p in reversed(curve)])[::-1]
    if method == "101point":
        total = 0.0
        for r in RECALL_GRID:
            k = bisect_left(recalls, r)
            if k < len(recalls):
                total += float(envelope[k])
        return total / len(RECALL_GRID)
    # continuous: sum precision-envelope area over recall steps
    area = 0.0
    prev_recall = 0.0
    for p, env in zip(curve, envelope):
        if p.recall > prev_recall:
            area += (p.recall - prev_recall) * float(env)
            prev_recall = p.recall
    return area


def max_f1_point(curve: Sequence[PRPoint]) -> MaxF1Point:
    """The sweep point maximizing F1, ties resolved toward higher confidence."""
    if not curve:
        raise EvalError("cannot pick an operating point from an empty curve")
    best: MaxF1Point | None = None
    for p in curve:  # descending confidence, so first win keeps the tie rule
        denom = p.precision + p.recall
        f1 = 2 * p.precision * p.recall / denom if denom > 0 else 0.0
        if best is None or f1 > best.f1:
            best = MaxF1Point(
                confidence=p.confidence, precision=p.precision, recall=p.recall, f1=f1
            )
    return best


def _count_gt(dataset: Dataset) -> int:
    return sum(len(dataset.gt_for(i)) for i in dataset.manifest.image_ids())


def evaluate(
    dataset: Dataset,
    dets: Sequence[Detection],
    params: PostprocessParams = PostprocessParams(),
    bin_thresholds: BinThresholds = BinThresholds(),
    iou_main: float = 0.5,
    *,
    apply_postprocess: bool = True,
    ap_method: str = "101point",
    extra_iou_thresholds: Sequence[float] = (),
    workers: int = 1,
) -> EvalReport:
    """Run the full evaluation and assemble a report.

    ``apply_postprocess`` controls whether confidence filtering and NMS
    run here (recorded in the report either way); pass False when the
    detections were already post-processed upstream. ``workers`` > 1
    matches images in a thread pool; results are merged in a fixed order,
    so the report is identical for any worker count.
    """
    manifest = dataset.manifest
    for d in dets:
        if d.image_id not in manifest:
            raise UnknownImageError(d.image_id)
    num_gt = _count_gt(dataset)
    if len(manifest) == 0 or num_gt == 0:
        raise EvalError("ground-truth corpus is empty")
    if not 0.0 < iou_main <= 1.0:
        raise UsageError(f"iou_main must be in (0, 1], got {iou_main}")

    if apply_postprocess:
        dets = postprocess_detections(dets, manifest, params)
    grouped = group_by_image(dets)
    image_ids = sorted(manifest.image_ids())
    thresholds = sorted(set(COCO_IOU_THRESHOLDS) | {iou_main} | set(extra_iou_thresholds))

    def match_one(task: tuple[float, str]) -> MatchSet:
        thr, image_id = task
        return match_image(
            dataset.gt_for(image_id), grouped.get(image_id, ()), manifest.dims(image_id), thr
        )

    tasks = [(thr, image_id) for thr in thresholds for image_id in image_ids]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            matchsets = dict(zip(tasks, pool.map(match_one, tasks)))
    else:
        matchsets = {task: match_one(task) for task in tasks}

    ap_per_iou: dict[float, float] = {}
    for thr in thresholds:
        per_image = [
            (image_id, grouped.get(image_id, ()), matchsets[(thr, image_id)])
            for image_id in image_ids
        ]
        curve = pr_sweep(per_image, num_gt)
        ap_per_iou[thr] = average_precision(curve, method=ap_method)
        if thr == iou_main:
            main_curve = curve

    undefined: list[str] = []
    if main_curve:
        op = max_f1_point(main_curve)
        precision, recall, f1 = op.precision, op.recall, op.f1
        conf_at_max_f1 = op.confidence
    else:
        precision = recall = f1 = 0.0
        conf_at_max_f1 = None
        undefined += ["precision", "conf_at_max_f1"]

    main_pairs = [
        (pair.gt, pair.det)
        for image_id in image_ids
        for pair in matchsets[(iou_main, image_id)].pairs
    ]
    bin_report = bin_confusion(main_pairs, manifest, bin_thresholds)

    map50 = ap_per_iou[0.50]
    map5095 = math.fsum(ap_per_iou[t] for t in COCO_IOU_THRESHOLDS) / len(COCO_IOU_THRESHOLDS)
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        conf_at_max_f1=conf_at_max_f1,
        ap_per_iou=ap_per_iou,
        map50=map50,
        map5095=map5095,
        bin_report=bin_report,
        params=params,
        counts={"images": len(manifest), "gt": num_gt, "detections": len(dets)},
        postprocess_applied=apply_postprocess,
        ap_method=ap_method,
        undefined=tuple(undefined),
    )
