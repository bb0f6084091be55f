#!/usr/bin/env python3
"""Sweep the confidence floor and tabulate the resulting metrics.

Useful for picking an operating threshold: shows precision, recall, F1,
mAP@0.5 and mAP@0.5:0.95 for each confidence floor in the sweep. NMS and
binning settings stay fixed.
"""

import argparse
from pathlib import Path

from loggauge.annot_io import load_dataset, load_detections_file, load_manifest_file
from loggauge.metrics import evaluate
from loggauge.postprocess import PostprocessParams


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("manifest", type=Path)
    ap.add_argument("detections", type=Path)
    ap.add_argument("--start", type=float, default=0.05)
    ap.add_argument("--stop", type=float, default=0.95)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--nms-iou", type=float, default=0.45)
    args = ap.parse_args()

    dataset = load_dataset(load_manifest_file(args.manifest))
    dets = load_detections_file(args.detections)

    print(f"{'conf':>6} {'prec':>7} {'recall':>7} {'f1':>7} {'map50':>7} {'map5095':>8} {'kept':>6}")
    conf = args.start
    while conf <= args.stop + 1e-9:
        params = PostprocessParams(conf_threshold=round(conf, 4), nms_iou_threshold=args.nms_iou)
        r = evaluate(dataset, dets, params=params)
        print(
            f"{params.conf_threshold:>6.2f} {r.precision:>7.3f} {r.recall:>7.3f} "
            f"{r.f1:>7.3f} {r.map50:>7.3f} {r.map5095:>8.3f} {r.counts['detections']:>6}"
        )
        conf += args.step
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
