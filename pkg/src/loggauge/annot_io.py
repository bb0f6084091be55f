"""Annotation and detection file formats.

Three on-disk formats are understood:

* YOLO ground truth: one ``.txt`` per image, each non-empty line
  ``class cx cy w h`` with whitespace separation and normalized floats.
  An empty file is an image with zero logs.
* Detections interchange: UTF-8 line-delimited JSON, one object per line
  with fields exactly ``image_id`` (str), ``class_id`` (int), ``cx``,
  ``cy``, ``w``, ``h`` (normalized floats) and ``confidence`` (float in
  [0, 1]). In lenient mode, ``#``-prefixed lines are skipped and unknown
  extra fields are ignored with a warning; in strict mode (the default)
  both are errors.
* Manifest: JSON array of ``{"image_id", "width", "height", "gt", "image"}``
  binding image ids to pixel dimensions and annotation paths. ``gt`` and
  ``image`` are resolved relative to the manifest's directory. ``gt`` may
  be absent for manifests that only bind dimensions (e.g. ones emitted by
  an inference exporter); operations that need ground truth reject such
  entries with a clear error.

COCO-style dataset JSON (``images`` + ``annotations`` with pixel ``bbox``
and optional ``segmentation`` polygons) is parsed into the same in-memory
model. Parsing is strict and order-preserving: a malformed record is never
silently dropped, and every error names the offending line or record.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import BoxError, ParseError, UnknownImageError, UsageError
from .geometry import (
    EDGE_TOL,
    ImageDims,
    NormBox,
    PixelBox,
    pixel_to_norm,
    polygon_bbox,
)

log = logging.getLogger(__name__)

DETECTION_FIELDS = ("image_id", "class_id", "cx", "cy", "w", "h", "confidence")


@dataclass(frozen=True)
class GroundTruth:
    """One annotated log instance bound to an image."""

    image_id: str
    class_id: int
    box: NormBox

    def __post_init__(self):
        if not isinstance(self.class_id, int) or isinstance(self.class_id, bool):
            raise ParseError(f"class_id must be an integer, got {self.class_id!r}")
        if self.class_id < 0:
            raise ParseError(f"class_id must be non-negative, got {self.class_id}")


@dataclass(frozen=True)
class Detection:
    """One predicted log instance with a confidence score."""

    image_id: str
    class_id: int
    box: NormBox
    confidence: float

    def __post_init__(self):
        if not isinstance(self.class_id, int) or isinstance(self.class_id, bool):
            raise ParseError(f"class_id must be an integer, got {self.class_id!r}")
        if self.class_id < 0:
            raise ParseError(f"class_id must be non-negative, got {self.class_id}")
        c = self.confidence
        if not isinstance(c, (int, float)) or isinstance(c, bool) or not math.isfinite(c):
            raise ParseError(f"confidence must be a finite number, got {c!r}")
        if not 0.0 <= c <= 1.0:
            raise ParseError(f"confidence must be in [0, 1], got {c}")

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "image_id": self.image_id,
                "class_id": self.class_id,
                "cx": self.box.cx,
                "cy": self.box.cy,
                "w": self.box.w,
                "h": self.box.h,
                "confidence": self.confidence,
            }
        )


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    dims: ImageDims
    gt_path: Path | None
    image_path: Path | None = None


@dataclass(frozen=True)
class DatasetManifest:
    """Index binding image ids to dimensions and annotation paths."""

    entries: tuple[ManifestEntry, ...]
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        for e in self.entries:
            if e.image_id in by_id:
                raise ParseError(f"duplicate image id {e.image_id!r} in manifest")
            by_id[e.image_id] = e
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._by_id

    def image_ids(self) -> list[str]:
        return [e.image_id for e in self.entries]

    def entry(self, image_id: str) -> ManifestEntry:
        try:
            return self._by_id[image_id]
        except KeyError:
            raise UnknownImageError(image_id) from None

    def dims(self, image_id: str) -> ImageDims:
        return self.entry(image_id).dims


@dataclass(frozen=True)
class Dataset:
    """A manifest plus per-image ground truth, keyed by image id."""

    manifest: DatasetManifest
    ground_truth: Mapping[str, tuple[GroundTruth, ...]]

    def __post_init__(self):
        for image_id in self.ground_truth:
            if image_id not in self.manifest:
                raise UnknownImageError(image_id)

    def gt_for(self, image_id: str) -> tuple[GroundTruth, ...]:
        self.manifest.entry(image_id)
        return self.ground_truth.get(image_id, ())

    @property
    def num_instances(self) -> int:
        return sum(len(v) for v in self.ground_truth.values())


def _parse_norm_coord(token: str, name: str, lineno: int, path=None) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"non-numeric {name} field {token!r}", line=lineno, path=path) from None
    if not (-EDGE_TOL <= v <= 1 + EDGE_TOL):
        raise ParseError(
            f"{name}={v} outside [-{EDGE_TOL}, 1+{EDGE_TOL}]", line=lineno, path=path
        )
    return v


def parse_yolo_gt(content: str, image_id: str, path=None) -> list[GroundTruth]:
    """Parse YOLO-format ground-truth text for one image."""
    records = []
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise ParseError(
                f"expected 5 fields 'class cx cy w h', got {len(fields)}",
                line=lineno,
                path=path,
            )
        try:
            class_id = int(fields[0])
        except ValueError:
            raise ParseError(
                f"non-integer class field {fields[0]!r}", line=lineno, path=path
            ) from None
        cx = _parse_norm_coord(fields[1], "cx", lineno, path)
        cy = _parse_norm_coord(fields[2], "cy", lineno, path)
        w = _parse_norm_coord(fields[3], "w", lineno, path)
        h = _parse_norm_coord(fields[4], "h", lineno, path)
        if w <= 0 or h <= 0:
            raise ParseError(f"box extents must be positive, got w={w} h={h}", line=lineno, path=path)
        try:
            records.append(GroundTruth(image_id=image_id, class_id=class_id, box=NormBox(cx, cy, w, h)))
        except (BoxError, ParseError) as e:
            raise ParseError(str(e), line=lineno, path=path) from None
    return records


def write_yolo_gt(records: Sequence[GroundTruth]) -> str:
    """Render ground-truth records for one image as YOLO-format text.

    Coordinates are written with fixed 6-decimal precision, so a
    parse/write round trip reproduces each coordinate within 1e-6.
    """
    if not records:
        return ""
    image_ids = {r.image_id for r in records}
    if len(image_ids) > 1:
        raise UsageError(f"records span multiple images: {sorted(image_ids)}")
    lines = [
        f"{r.class_id} {r.box.cx:.6f} {r.box.cy:.6f} {r.box.w:.6f} {r.box.h:.6f}"
        for r in records
    ]
    return "\n".join(lines) + "\n"


def parse_detections(content: str, strict: bool = True, path=None) -> list[Detection]:
    """Parse line-delimited JSON detection records."""
    records = []
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if strict:
                raise ParseError(
                    "comment lines are not allowed in strict mode", line=lineno, path=path
                )
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=lineno, path=path) from None
        if not isinstance(obj, dict):
            raise ParseError("detection record must be a JSON object", line=lineno, path=path)
        missing = [k for k in DETECTION_FIELDS if k not in obj]
        if missing:
            raise ParseError(f"missing field(s): {', '.join(missing)}", line=lineno, path=path)
        extra = sorted(set(obj) - set(DETECTION_FIELDS))
        if extra:
            if strict:
                raise ParseError(f"unknown field(s): {', '.join(extra)}", line=lineno, path=path)
            log.warning("%sline %d: ignoring unknown field(s): %s",
                        f"{path}: " if path else "", lineno, ", ".join(extra))
        if not isinstance(obj["image_id"], str):
            raise ParseError(f"image_id must be a string, got {obj['image_id']!r}",
                             line=lineno, path=path)
        for key in ("cx", "cy", "w", "h", "confidence"):
            v = obj[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ParseError(f"{key} must be a number, got {v!r}", line=lineno, path=path)
        try:
            records.append(
                Detection(
                    image_id=obj["image_id"],
                    class_id=obj["class_id"],
                    box=NormBox(float(obj["cx"]), float(obj["cy"]), float(obj["w"]), float(obj["h"])),
                    confidence=float(obj["confidence"]),
                )
            )
        except (BoxError, ParseError) as e:
            raise ParseError(str(e), line=lineno, path=path) from None
    return records


def write_detections(dets: Iterable[Detection]) -> str:
    lines = [d.to_json_line() for d in dets]
    return "\n".join(lines) + ("\n" if lines else "")


def _coco_image_key(img: dict, record: int) -> str:
    file_name = img.get("file_name")
    if isinstance(file_name, str) and file_name:
        return Path(file_name).stem
    return str(img.get("id"))


def parse_coco_dataset(content: str, path=None) -> Dataset:
    """Parse a COCO-style dataset JSON into a manifest plus ground truth.

    Boxes come from ``bbox`` (``[x, y, w, h]`` in pixels) when present,
    otherwise from the minimal box over all ``segmentation`` polygon
    points; a log split into several polygons by occlusion is still one
    instance, so the box covers the union of all its polygons.
    """
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path=path) from None
    if not isinstance(data, dict) or "images" not in data or "annotations" not in data:
        raise ParseError("COCO dataset must be an object with 'images' and 'annotations'", path=path)

    entries = []
    by_coco_id: dict = {}
    for rec, img in enumerate(data["images"], start=1):
        if not isinstance(img, dict) or "id" not in img:
            raise ParseError(f"images[{rec}]: missing 'id'", path=path)
        try:
            dims = ImageDims(img["width"], img["height"])
        except (BoxError, KeyError, TypeError) as e:
            raise ParseError(f"images[{rec}] (id {img['id']!r}): bad dims: {e}", path=path) from None
        image_id = _coco_image_key(img, rec)
        if img["id"] in by_coco_id:
            raise ParseError(f"images[{rec}]: duplicate COCO image id {img['id']!r}", path=path)
        by_coco_id[img["id"]] = (image_id, dims)
        file_name = img.get("file_name")
        entries.append(
            ManifestEntry(
                image_id=image_id,
                dims=dims,
                gt_path=None,
                image_path=Path(file_name) if isinstance(file_name, str) and file_name else None,
            )
        )
    manifest = DatasetManifest(entries=tuple(entries))

    ground_truth: dict[str, list[GroundTruth]] = {e.image_id: [] for e in entries}
    for rec, ann in enumerate(data["annotations"], start=1):
        if not isinstance(ann, dict):
            raise ParseError(f"annotations[{rec}]: not an object", path=path)
        coco_img = ann.get("image_id")
        if coco_img not in by_coco_id:
            raise ParseError(
                f"annotations[{rec}]: unknown image id {coco_img!r}", path=path
            )
        image_id, dims = by_coco_id[coco_img]
        bbox = ann.get("bbox")
        seg = ann.get("segmentation")
        if bbox is not None:
            if not (isinstance(bbox, (list, tuple)) and len(bbox) == 4):
                raise ParseError(f"annotations[{rec}]: bbox must be [x, y, w, h]", path=path)
            x, y, w, h = (float(v) for v in bbox)
            if w <= 0 or h <= 0:
                raise ParseError(
                    f"annotations[{rec}]: bbox extents must be positive, got w={w} h={h}",
                    path=path,
                )
            pbox = PixelBox(x, y, x + w, y + h)
        elif seg:
            points = []
            if not isinstance(seg, (list, tuple)):
                raise ParseError(f"annotations[{rec}]: malformed segmentation", path=path)
            for poly in seg:
                if not isinstance(poly, (list, tuple)) or len(poly) < 6 or len(poly) % 2:
                    raise ParseError(
                        f"annotations[{rec}]: polygon must be a flat even-length "
                        f"list of at least 3 points",
                        path=path,
                    )
                points.extend(zip(poly[0::2], poly[1::2]))
            try:
                pbox = polygon_bbox(points)
            except BoxError as e:
                raise ParseError(f"annotations[{rec}]: {e}", path=path) from None
        else:
            raise ParseError(
                f"annotations[{rec}]: neither bbox nor segmentation present", path=path
            )
        try:
            nbox = pixel_to_norm(pbox, dims)
        except BoxError as e:
            raise ParseError(f"annotations[{rec}]: {e}", path=path) from None
        cat = ann.get("category_id", 0)
        try:
            ground_truth[image_id].append(GroundTruth(image_id=image_id, class_id=cat, box=nbox))
        except ParseError as e:
            raise ParseError(f"annotations[{rec}]: {e}", path=path) from None

    return Dataset(
        manifest=manifest,
        ground_truth={k: tuple(v) for k, v in ground_truth.items()},
    )


def load_manifest(content: str, base_dir: Path | str, path=None) -> DatasetManifest:
    """Parse a manifest JSON array, resolving paths against ``base_dir``."""
    base = Path(base_dir)
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path=path) from None
    if not isinstance(data, list):
        raise ParseError("manifest must be a JSON array", path=path)
    entries = []
    seen = set()
    for rec, obj in enumerate(data, start=1):
        if not isinstance(obj, dict):
            raise ParseError(f"entry {rec}: not an object", path=path)
        image_id = obj.get("image_id")
        if not isinstance(image_id, str) or not image_id:
            raise ParseError(f"entry {rec}: image_id must be a non-empty string", path=path)
        if image_id in seen:
            raise ParseError(f"entry {rec}: duplicate image id {image_id!r}", path=path)
        seen.add(image_id)
        width, height = obj.get("width"), obj.get("height")
        if not isinstance(width, int) or not isinstance(height, int) or isinstance(width, bool) or isinstance(height, bool):
            raise ParseError(f"entry {rec} ({image_id!r}): width/height must be integers", path=path)
        try:
            dims = ImageDims(width, height)
        except BoxError as e:
            raise ParseError(f"entry {rec} ({image_id!r}): {e}", path=path) from None
        gt_rel = obj.get("gt")
        gt_path = None
        if gt_rel is not None:
            if not isinstance(gt_rel, str):
                raise ParseError(f"entry {rec} ({image_id!r}): gt must be a path string", path=path)
            gt_path = base / gt_rel
            if not gt_path.is_file():
                raise ParseError(
                    f"entry {rec} ({image_id!r}): gt file not found: {gt_path}", path=path
                )
        image_rel = obj.get("image")
        image_path = base / image_rel if isinstance(image_rel, str) else None
        entries.append(
            ManifestEntry(image_id=image_id, dims=dims, gt_path=gt_path, image_path=image_path)
        )
    return DatasetManifest(entries=tuple(entries))


def load_manifest_file(path: Path | str) -> DatasetManifest:
    p = Path(path)
    return load_manifest(p.read_text(encoding="utf-8"), p.parent, path=p)


def load_dataset(manifest: DatasetManifest) -> Dataset:
    """Read every manifest entry's ground-truth file."""
    ground_truth = {}
    for entry in manifest.entries:
        if entry.gt_path is None:
            raise UsageError(
                f"manifest entry {entry.image_id!r} has no ground-truth path; "
                "this manifest only binds image dimensions"
            )
        content = entry.gt_path.read_text(encoding="utf-8")
        ground_truth[entry.image_id] = tuple(
            parse_yolo_gt(content, entry.image_id, path=entry.gt_path)
        )
    return Dataset(manifest=manifest, ground_truth=ground_truth)


def load_detections_file(path: Path | str, strict: bool = True) -> list[Detection]:
    p = Path(path)
    return parse_detections(p.read_text(encoding="utf-8"), strict=strict, path=p)


def manifest_to_json(manifest: DatasetManifest, base_dir: Path | str) -> str:
    """Render a manifest as JSON with paths relative to ``base_dir``."""
    base = Path(base_dir)

    def rel(p: Path | None):
        if p is None:
            return None
        try:
            return str(p.relative_to(base))
        except ValueError:
            return str(p)

    out = []
    for e in manifest.entries:
        obj = {"image_id": e.image_id, "width": e.dims.width, "height": e.dims.height}
        if e.gt_path is not None:
            obj["gt"] = rel(e.gt_path)
        if e.image_path is not None:
            obj["image"] = rel(e.image_path)
        out.append(obj)
    return json.dumps(out, indent=2) + "\n"


def dataset_to_coco_dict(dataset: Dataset) -> dict:
    """Render a dataset as a COCO-style dict (boxes only, no masks)."""
    from .geometry import norm_to_pixel

    images = []
    annotations = []
    categories = set()
    coco_id = {}
    for n, entry in enumerate(dataset.manifest.entries, start=1):
        coco_id[entry.image_id] = n
        images.append(
            {
                "id": n,
                "width": entry.dims.width,
                "height": entry.dims.height,
                "file_name": str(entry.image_path) if entry.image_path else f"{entry.image_id}.jpg",
            }
        )
    ann_id = 0
    for entry in dataset.manifest.entries:
        dims = entry.dims
        for gt in dataset.gt_for(entry.image_id):
            ann_id += 1
            p = norm_to_pixel(gt.box, dims)
            categories.add(gt.class_id)
            annotations.append(
                {
                    "id": ann_id,
                    "image_id": coco_id[entry.image_id],
                    "category_id": gt.class_id,
                    "bbox": [p.x_min, p.y_min, p.width, p.height],
                    "area": p.area,
                    "iscrowd": 0,
                }
            )
    return {
        "images": images,
        "annotations": annotations,
        "categories": [
            {"id": c, "name": "wood" if c == 0 else f"class_{c}"} for c in sorted(categories)
        ],
    }
