"""Command-line interface: one binary, one subcommand per pipeline stage.

Subcommands mirror the workflow: ``stats`` summarizes a dataset,
``convert`` moves annotations between COCO and YOLO layouts, ``nms``
post-processes raw detections, ``bin`` assigns diameter categories, and
``eval`` produces the full evaluation report.

Settings resolve as flags > config file > built-in defaults. The config
file is JSON with keys matching the run configuration: ``postprocess``
(object with ``conf_threshold`` and ``nms_iou_threshold``),
``bin_thresholds`` (pair ``[thin_max, medium_max]``), ``iou_main``,
``strict_parsing``, and ``output_path``. ``LOGGAUGE_CONFIG`` names a
default config path.

Exit codes: 0 success, 1 failed ``--assert``, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import annot_io, binning, dataset_stats, metrics, postprocess
from .binning import BinThresholds
from .errors import LogGaugeError, ParseError, UsageError
from .postprocess import PostprocessParams

DEFAULT_CONF = 0.25
DEFAULT_NMS_IOU = 0.45
DEFAULT_IOU_MAIN = 0.5
CONFIG_ENV_VAR = "LOGGAUGE_CONFIG"


@dataclass
class RunConfig:
    postprocess: PostprocessParams
    bin_thresholds: BinThresholds
    iou_main: float
    strict_parsing: bool
    output_path: Path | None


def _first(*values):
    for v in values:
        if v is not None:
            return v
    return None


def _parse_thresholds(text: str) -> BinThresholds:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--thresholds expects 'thin_max,medium_max', got {text!r}")
    try:
        return BinThresholds(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise UsageError(f"bad --thresholds {text!r}: {e}") from None


def _parse_iou_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--iou-range expects 'start:stop:step', got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"non-numeric --iou-range {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"empty --iou-range {text!r}")
    n = int(round((stop - start) / step))
    values = [round(start + i * step, 10) for i in range(n + 1) if start + i * step <= stop + 1e-9]
    for v in values:
        if not 0.0 < v <= 1.0:
            raise UsageError(f"--iou-range value {v} outside (0, 1]")
    return values


ASSERT_RE = re.compile(r"^([A-Za-z0-9_@.]+)>=([-+0-9.eE]+)$")


def _parse_assert(text: str) -> tuple[str, float]:
    m = ASSERT_RE.match(text.replace(" ", ""))
    if not m:
        raise UsageError(f"--assert expects 'METRIC>=VALUE', got {text!r}")
    return m.group(1), float(m.group(2))


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over an optional JSON config over defaults."""
    config_path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    data: dict = {}
    if config_path:
        p = Path(config_path)
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON in config: {e.msg}", path=p) from None
        if not isinstance(data, dict):
            raise ParseError("config must be a JSON object", path=p)
    pp = data.get("postprocess", {})
    if not isinstance(pp, dict):
        raise ParseError("config key 'postprocess' must be an object")
    conf = _first(getattr(args, "conf", None), pp.get("conf_threshold"), DEFAULT_CONF)
    nms_iou = _first(getattr(args, "nms_iou", None), pp.get("nms_iou_threshold"), DEFAULT_NMS_IOU)
    bt_flag = getattr(args, "thresholds", None)
    if bt_flag is not None:
        bin_thresholds = _parse_thresholds(bt_flag)
    elif "bin_thresholds" in data:
        raw = data["bin_thresholds"]
        if isinstance(raw, dict):
            bin_thresholds = BinThresholds(float(raw["thin_max"]), float(raw["medium_max"]))
        elif isinstance(raw, (list, tuple)) and len(raw) == 2:
            bin_thresholds = BinThresholds(float(raw[0]), float(raw[1]))
        else:
            raise ParseError("config key 'bin_thresholds' must be [thin_max, medium_max]")
    else:
        bin_thresholds = BinThresholds()
    iou_main = _first(getattr(args, "iou", None), data.get("iou_main"), DEFAULT_IOU_MAIN)
    strict = _first(getattr(args, "strict", None), data.get("strict_parsing"), True)
    out = _first(getattr(args, "out", None), data.get("output_path"))
    return RunConfig(
        postprocess=PostprocessParams(conf_threshold=conf, nms_iou_threshold=nms_iou),
        bin_thresholds=bin_thresholds,
        iou_main=float(iou_main),
        strict_parsing=bool(strict),
        output_path=Path(out) if out else None,
    )


def _emit(text: str, out_path: Path | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")


def _report_json(payload: dict, with_timestamp: bool) -> str:
    if with_timestamp:
        payload = dict(payload)
        payload["generated_at"] = datetime.now(timezone.utc).isoformat()
    return json.dumps(payload, indent=2) + "\n"


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    manifest = annot_io.load_manifest_file(args.manifest)
    dataset = annot_io.load_dataset(manifest)
    stats = dataset_stats.compute_stats(dataset)
    if args.json:
        _emit(_report_json(stats.to_dict(), not args.no_timestamp), cfg.output_path)
    else:
        _emit(dataset_stats.format_stats_table(stats), cfg.output_path)
    return 0


_ASSERTABLE = ("precision", "recall", "f1", "map50", "map5095", "bin_accuracy", "conf_at_max_f1")


def _lookup_metric(report: metrics.EvalReport, name: str) -> float | None:
    if name == "bin_accuracy":
        return report.bin_report.bin_accuracy
    if name in _ASSERTABLE:
        return getattr(report, name)
    if name.startswith("ap@"):
        try:
            thr = float(name[3:])
        except ValueError:
            raise UsageError(f"bad AP threshold in --assert metric {name!r}") from None
        for t, ap in report.ap_per_iou.items():
            if abs(t - thr) < 1e-9:
                return ap
        raise UsageError(f"--assert metric {name!r}: threshold {thr} was not evaluated")
    raise UsageError(
        f"unknown --assert metric {name!r}; known: {', '.join(_ASSERTABLE)}, ap@THRESHOLD"
    )


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    manifest = annot_io.load_manifest_file(args.manifest)
    dataset = annot_io.load_dataset(manifest)
    dets = annot_io.load_detections_file(args.detections, strict=cfg.strict_parsing)
    extra = _parse_iou_range(args.iou_range) if args.iou_range else []
    report = metrics.evaluate(
        dataset,
        dets,
        params=cfg.postprocess,
        bin_thresholds=cfg.bin_thresholds,
        iou_main=cfg.iou_main,
        apply_postprocess=not args.no_postprocess,
        ap_method=args.ap_method,
        extra_iou_thresholds=extra,
        workers=args.workers,
    )
    _emit(_report_json(report.to_dict(), not args.no_timestamp), cfg.output_path)
    failures = []
    for spec in args.asserts or []:
        name, floor = _parse_assert(spec)
        value = _lookup_metric(report, name)
        if value is None:
            failures.append(f"{name} is undefined, required >= {floor}")
        elif value < floor:
            failures.append(f"{name} = {value:.6f}, required >= {floor}")
    if failures:
        for f in failures:
            print(f"assertion failed: {f}", file=sys.stderr)
        return 1
    return 0


def cmd_bin(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    manifest = annot_io.load_manifest_file(args.manifest)
    dets = annot_io.load_detections_file(args.detections, strict=cfg.strict_parsing)
    binned = binning.bin_detections(dets, manifest, cfg.bin_thresholds)
    hist = binning.histogram([b for _, b in binned])

    report = None
    if all(e.gt_path is not None for e in manifest.entries):
        dataset = annot_io.load_dataset(manifest)
        processed = postprocess.postprocess_detections(dets, manifest, cfg.postprocess)
        grouped = postprocess.group_by_image(processed)
        pairs = []
        for image_id in sorted(manifest.image_ids()):
            mset = metrics.match_image(
                dataset.gt_for(image_id),
                grouped.get(image_id, ()),
                manifest.dims(image_id),
                cfg.iou_main,
            )
            pairs.extend((p.gt, p.det) for p in mset.pairs)
        report = binning.bin_confusion(pairs, manifest, cfg.bin_thresholds)

    if args.json:
        payload: dict = {
            "thresholds": {
                "thin_max": cfg.bin_thresholds.thin_max,
                "medium_max": cfg.bin_thresholds.medium_max,
            },
            "histogram": {b.label: hist[b] for b in binning.DiameterBin},
        }
        if report is not None:
            payload["matched"] = report.to_dict()
        _emit(_report_json(payload, not args.no_timestamp), cfg.output_path)
    else:
        lines = [
            f"Bin thresholds: thin < {cfg.bin_thresholds.thin_max} px <= medium <= "
            f"{cfg.bin_thresholds.medium_max} px < thick",
            "Detections per bin:",
        ]
        for b in binning.DiameterBin:
            lines.append(f"  {b.label:<7}{hist[b]}")
        if report is not None:
            lines.append("Matched-pair confusion (rows = ground truth, cols = detection):")
            header = "          " + "".join(f"{b.label:>8}" for b in binning.DiameterBin)
            lines.append(header)
            for gb in binning.DiameterBin:
                row = "".join(f"{report.confusion[gb][db]:>8}" for db in binning.DiameterBin)
                lines.append(f"  {gb.label:<8}{row}")
            acc = report.bin_accuracy
            lines.append(
                f"Bin accuracy: {acc:.4f}" if acc is not None else "Bin accuracy: undefined (no matched pairs)"
            )
        _emit("\n".join(lines) + "\n", cfg.output_path)
    return 0


def cmd_nms(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    manifest = annot_io.load_manifest_file(args.manifest)
    dets = annot_io.load_detections_file(args.detections, strict=cfg.strict_parsing)
    kept = postprocess.postprocess_detections(dets, manifest, cfg.postprocess)
    _emit(annot_io.write_detections(kept), cfg.output_path)
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    cfg = load_run_config(args)
    src, dst = args.from_format, args.to_format
    if src == dst:
        raise UsageError(f"nothing to convert: --from and --to are both {src!r}")
    if src == "coco" and dst == "yolo":
        content = Path(args.input).read_text(encoding="utf-8")
        dataset = annot_io.parse_coco_dataset(content, path=args.input)
        out_dir = cfg.output_path
        if out_dir is None:
            raise UsageError("coco->yolo conversion needs --out DIRECTORY")
        from .synth import write_dataset

        manifest_path = write_dataset(dataset, out_dir)
        print(
            f"wrote {len(dataset.manifest)} label file(s) and {manifest_path}",
            file=sys.stderr,
        )
        return 0
    if src == "yolo" and dst == "coco":
        manifest = annot_io.load_manifest_file(args.input)
        dataset = annot_io.load_dataset(manifest)
        payload = annot_io.dataset_to_coco_dict(dataset)
        _emit(json.dumps(payload, indent=2) + "\n", cfg.output_path)
        return 0
    raise UsageError(f"unsupported conversion {src!r} -> {dst!r}")


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file (default: $LOGGAUGE_CONFIG)")
    sp.add_argument("--out", help="write output here instead of stdout")
    sp.add_argument("--json", action="store_true", help="machine-readable JSON output")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument(
        "--strict", dest="strict", action="store_true", default=None,
        help="reject unknown fields and comment lines (default)",
    )
    mode.add_argument(
        "--lenient", dest="strict", action="store_false",
        help="skip '#' comment lines and ignore unknown detection fields with a warning",
    )
    sp.add_argument(
        "--no-timestamp", action="store_true",
        help="omit the generated_at field for byte-reproducible output",
    )


def _add_eval_params(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--conf", type=float, default=None,
                    help=f"confidence floor (default {DEFAULT_CONF})")
    sp.add_argument("--nms-iou", type=float, default=None,
                    help=f"NMS IoU threshold (default {DEFAULT_NMS_IOU})")
    sp.add_argument("--thresholds", default=None, metavar="THIN,MEDIUM",
                    help="diameter bin thresholds in px (default 30,60)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loggauge",
        description="Timber-log detection evaluation toolkit: dataset statistics, "
        "annotation conversion, post-processing, diameter binning, and mAP evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="dataset summary statistics from a manifest")
    p.add_argument("manifest", help="manifest JSON path")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="evaluate detections against ground truth")
    p.add_argument("manifest", help="manifest JSON path")
    p.add_argument("detections", help="detections interchange file (JSON lines)")
    _add_common(p)
    _add_eval_params(p)
    p.add_argument("--iou", type=float, default=None,
                   help=f"main IoU threshold for the P/R/F1 operating point (default {DEFAULT_IOU_MAIN})")
    p.add_argument("--iou-range", default=None, metavar="START:STOP:STEP",
                   help="extra IoU thresholds to report AP at (mAP aggregates always use 0.50:0.95:0.05)")
    p.add_argument("--no-postprocess", action="store_true",
                   help="evaluate detections as-is (skip confidence filter and NMS)")
    p.add_argument("--ap-method", choices=metrics.AP_METHODS, default="101point",
                   help="AP interpolation scheme (default 101point)")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads for per-image matching (output is identical for any value)")
    p.add_argument("--assert", dest="asserts", action="append", metavar="METRIC>=VALUE",
                   help="exit 1 unless METRIC >= VALUE (repeatable), e.g. map50>=0.6")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bin", help="diameter-bin histogram and confusion")
    p.add_argument("manifest", help="manifest JSON path")
    p.add_argument("detections", help="detections interchange file (JSON lines)")
    _add_common(p)
    _add_eval_params(p)
    p.add_argument("--iou", type=float, default=None,
                   help=f"IoU threshold for matching pairs (default {DEFAULT_IOU_MAIN})")
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("nms", help="confidence filter and greedy NMS on a detections file")
    p.add_argument("manifest", help="manifest JSON path")
    p.add_argument("detections", help="detections interchange file (JSON lines)")
    _add_common(p)
    _add_eval_params(p)
    p.set_defaults(func=cmd_nms)

    p = sub.add_parser("convert", help="convert annotations between coco and yolo layouts")
    p.add_argument("input", help="input path: COCO JSON for --from coco, manifest JSON for --from yolo")
    p.add_argument("--from", dest="from_format", required=True, choices=("coco", "yolo"))
    p.add_argument("--to", dest="to_format", required=True, choices=("coco", "yolo"))
    _add_common(p)
    p.set_defaults(func=cmd_convert)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LogGaugeError as e:
        print(f"loggauge: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"loggauge: error: {e}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
