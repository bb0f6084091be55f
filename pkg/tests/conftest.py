"""Shared fixtures and small builders for the test suite."""

from __future__ import annotations

import random

import pytest

from loggauge.annot_io import Dataset, DatasetManifest, Detection, GroundTruth, ManifestEntry
from loggauge.geometry import ImageDims, NormBox


def gt(image_id="img", class_id=0, cx=0.5, cy=0.5, w=0.2, h=0.2):
    return GroundTruth(image_id=image_id, class_id=class_id, box=NormBox(cx, cy, w, h))


def det(image_id="img", class_id=0, cx=0.5, cy=0.5, w=0.2, h=0.2, conf=0.9):
    return Detection(
        image_id=image_id, class_id=class_id, box=NormBox(cx, cy, w, h), confidence=conf
    )


def dataset_from(records, dims_by_image):
    """Build an in-memory dataset from GroundTruth records and a dims map."""
    entries = tuple(
        ManifestEntry(image_id=i, dims=d, gt_path=None) for i, d in dims_by_image.items()
    )
    ground_truth: dict[str, list[GroundTruth]] = {i: [] for i in dims_by_image}
    for r in records:
        ground_truth[r.image_id].append(r)
    return Dataset(
        manifest=DatasetManifest(entries=entries),
        ground_truth={k: tuple(v) for k, v in ground_truth.items()},
    )


def plain_images(dataset):
    return [(e.image_id, e.dims.width, e.dims.height) for e in dataset.manifest.entries]


def plain_gt(dataset):
    return {
        e.image_id: [
            (g.class_id, g.box.cx, g.box.cy, g.box.w, g.box.h)
            for g in dataset.gt_for(e.image_id)
        ]
        for e in dataset.manifest.entries
    }


def plain_dets(dets):
    out: dict[str, list] = {}
    for d in dets:
        out.setdefault(d.image_id, []).append(
            (d.class_id, d.box.cx, d.box.cy, d.box.w, d.box.h, d.confidence)
        )
    return out


@pytest.fixture
def rng():
    return random.Random(20240817)


@pytest.fixture
def square_dims():
    return ImageDims(100, 100)
