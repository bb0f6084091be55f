"""Seeded synthetic datasets and noisy detections for tests and demos.

Scenes are random but reproducible: boxes are drawn inside the unit
square with a minimum extent, and detections are derived from ground
truth by jittering geometry, dropping instances, and injecting spurious
boxes, which exercises the matcher and the PR sweep with known noise
rates.
"""

from __future__ import annotations

import random
from pathlib import Path

from .annot_io import (
    Dataset,
    DatasetManifest,
    Detection,
    GroundTruth,
    ManifestEntry,
    manifest_to_json,
    write_detections,
    write_yolo_gt,
)
from .geometry import ImageDims, NormBox

MIN_EXTENT = 0.01


def random_norm_box(rng: random.Random, min_extent: float = MIN_EXTENT) -> NormBox:
    """A uniform random box strictly inside the unit square."""
    w = rng.uniform(min_extent, 0.6)
    h = rng.uniform(min_extent, 0.6)
    cx = rng.uniform(w / 2, 1 - w / 2)
    cy = rng.uniform(h / 2, 1 - h / 2)
    return NormBox(cx, cy, w, h)


def make_dataset(
    rng: random.Random,
    n_images: int = 5,
    max_boxes: int = 10,
    min_boxes: int = 0,
    dims_choices: tuple[ImageDims, ...] = (
        ImageDims(640, 480),
        ImageDims(1024, 768),
        ImageDims(4608, 3456),
    ),
) -> Dataset:
    """An in-memory dataset of random scenes (no files involved)."""
    entries = []
    ground_truth = {}
    for i in range(n_images):
        image_id = f"img{i:03d}"
        dims = rng.choice(dims_choices)
        entries.append(ManifestEntry(image_id=image_id, dims=dims, gt_path=None))
        n = rng.randint(min_boxes, max_boxes)
        ground_truth[image_id] = tuple(
            GroundTruth(image_id=image_id, class_id=0, box=random_norm_box(rng))
            for _ in range(n)
        )
    return Dataset(manifest=DatasetManifest(entries=tuple(entries)), ground_truth=ground_truth)


def _jitter_box(rng: random.Random, box: NormBox, jitter: float) -> NormBox:
    """Shift and rescale a box by up to +-jitter of its extents, keeping it
    inside the unit square and non-degenerate."""
    for _ in range(20):
        dx = rng.uniform(-jitter, jitter) * box.w
        dy = rng.uniform(-jitter, jitter) * box.h
        sw = 1 + rng.uniform(-jitter, jitter)
        sh = 1 + rng.uniform(-jitter, jitter)
        w = min(box.w * sw, 1.0)
        h = min(box.h * sh, 1.0)
        cx = min(max(box.cx + dx, w / 2), 1 - w / 2)
        cy = min(max(box.cy + dy, h / 2), 1 - h / 2)
        if w >= MIN_EXTENT / 2 and h >= MIN_EXTENT / 2:
            return NormBox(cx, cy, w, h)
    return box


def noisy_detections(
    rng: random.Random,
    dataset: Dataset,
    jitter: float = 0.15,
    drop_rate: float = 0.2,
    spurious_rate: float = 0.3,
) -> list[Detection]:
    """Detections derived from ground truth with seeded noise.

    Each ground truth is dropped with probability ``drop_rate`` or else
    emitted with jittered geometry and a random confidence; additionally
    each image gains Poisson-ish spurious boxes at ``spurious_rate`` per
    ground-truth instance (at least the chance of one on empty images).
    """
    dets: list[Detection] = []
    for image_id in dataset.manifest.image_ids():
        gts = dataset.gt_for(image_id)
        for gt in gts:
            if rng.random() < drop_rate:
                continue
            dets.append(
                Detection(
                    image_id=image_id,
                    class_id=gt.class_id,
                    box=_jitter_box(rng, gt.box, jitter),
                    confidence=rng.uniform(0.05, 1.0),
                )
            )
        n_spurious = sum(1 for _ in range(max(len(gts), 1)) if rng.random() < spurious_rate)
        for _ in range(n_spurious):
            dets.append(
                Detection(
                    image_id=image_id,
                    class_id=0,
                    box=random_norm_box(rng),
                    confidence=rng.uniform(0.05, 1.0),
                )
            )
    return dets


def perfect_detections(dataset: Dataset, confidence: float = 1.0) -> list[Detection]:
    """Ground truth replayed as detections."""
    return [
        Detection(image_id=gt.image_id, class_id=gt.class_id, box=gt.box, confidence=confidence)
        for image_id in dataset.manifest.image_ids()
        for gt in dataset.gt_for(image_id)
    ]


def write_dataset(dataset: Dataset, out_dir: Path | str) -> Path:
    """Materialize a dataset as YOLO gt files plus a manifest.

    Returns the manifest path. Ground-truth coordinates pass through the
    6-decimal YOLO writer, so boxes round to that precision on reload.
    """
    out = Path(out_dir)
    labels = out / "labels"
    labels.mkdir(parents=True, exist_ok=True)
    entries = []
    for e in dataset.manifest.entries:
        gt_path = labels / f"{e.image_id}.txt"
        gt_path.write_text(write_yolo_gt(list(dataset.gt_for(e.image_id))), encoding="utf-8")
        entries.append(
            ManifestEntry(image_id=e.image_id, dims=e.dims, gt_path=gt_path, image_path=e.image_path)
        )
    manifest = DatasetManifest(entries=tuple(entries))
    manifest_path = out / "manifest.json"
    manifest_path.write_text(manifest_to_json(manifest, out), encoding="utf-8")
    return manifest_path


def write_detections_file(dets: list[Detection], path: Path | str) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(write_detections(dets), encoding="utf-8")
    return p
