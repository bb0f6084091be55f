"""Axis-aligned box types, coordinate conversion, IoU, and polygon reduction.

Two coordinate conventions, matching what annotation files carry:

* ``NormBox`` -- YOLO-style: box center and extents as fractions of the
  image size, ``(cx, cy, w, h)``.
* ``PixelBox`` -- corner coordinates in pixels, ``(x_min, y_min, x_max, y_max)``.

Boxes are real-valued closed intervals; areas and IoU use continuous
arithmetic rather than pixel-grid counting, which matches the continuous
coordinates of exported annotation files. Normalized coordinates may
overhang [0, 1] by at most ``EDGE_TOL`` per side (rounding noise in real
exports); the overhang is clamped away on conversion to pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BoxError

#: Tolerated overhang of normalized coordinates beyond [0, 1]. Within the
#: band values are clamped on conversion; beyond it construction fails.
EDGE_TOL = 1e-6


@dataclass(frozen=True)
class ImageDims:
    """Pixel dimensions of one image."""

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise BoxError(
                f"image dims must be at least 1x1, got {self.width}x{self.height}"
            )


@dataclass(frozen=True)
class NormBox:
    """Center-normalized box with strictly positive extents."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("cx", "cy", "w", "h"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise BoxError(f"non-finite box field {name}={v!r}")
        if self.w <= 0 or self.h <= 0:
            raise BoxError(f"box extents must be positive, got w={self.w} h={self.h}")
        if (
            self.cx - self.w / 2 < -EDGE_TOL
            or self.cx + self.w / 2 > 1 + EDGE_TOL
            or self.cy - self.h / 2 < -EDGE_TOL
            or self.cy + self.h / 2 > 1 + EDGE_TOL
        ):
            raise BoxError(
                f"box exceeds the unit square beyond tolerance: "
                f"cx={self.cx} cy={self.cy} w={self.w} h={self.h}"
            )


@dataclass(frozen=True)
class PixelBox:
    """Corner-coordinate box in pixels. Zero extents are representable here;
    they are rejected at annotation ingestion, not in geometry."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise BoxError(f"non-finite box field {name}={v!r}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise BoxError(
                f"inverted box: ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def norm_to_pixel(box: NormBox, dims: ImageDims) -> PixelBox:
    """Convert a normalized box to pixel corners, clamped to the image."""
    w, h = dims.width, dims.height
    return PixelBox(
        _clamp((box.cx - box.w / 2) * w, 0.0, w),
        _clamp((box.cy - box.h / 2) * h, 0.0, h),
        _clamp((box.cx + box.w / 2) * w, 0.0, w),
        _clamp((box.cy + box.h / 2) * h, 0.0, h),
    )


def pixel_to_norm(box: PixelBox, dims: ImageDims) -> NormBox:
    """Convert pixel corners to a normalized box.

    The box is first clamped to the image bounds; a box that is zero-width
    or zero-height after clamping raises ``BoxError``.
    """
    w, h = dims.width, dims.height
    x0 = _clamp(box.x_min, 0.0, w)
    x1 = _clamp(box.x_max, 0.0, w)
    y0 = _clamp(box.y_min, 0.0, h)
    y1 = _clamp(box.y_max, 0.0, h)
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        raise BoxError(
            f"degenerate box after clamping to {w}x{h}: "
            f"({box.x_min}, {box.y_min}, {box.x_max}, {box.y_max})"
        )
    return NormBox(
        cx=(x0 + x1) / 2 / w,
        cy=(y0 + y1) / 2 / h,
        w=(x1 - x0) / w,
        h=(y1 - y0) / h,
    )


def iou(a: PixelBox, b: PixelBox) -> float:
    """Intersection-over-union of two pixel boxes.

    Returns 0 for disjoint boxes and when both boxes have zero area.
    """
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


def polygon_bbox(points: Sequence[tuple[float, float]] | Iterable[tuple[float, float]]) -> PixelBox:
    """Minimal axis-aligned box containing every polygon vertex."""
    pts = list(points)
    if len(pts) < 3:
        raise BoxError(f"polygon needs at least 3 points, got {len(pts)}")
    xs = []
    ys = []
    for p in pts:
        x, y = p
        if not math.isfinite(x) or not math.isfinite(y):
            raise BoxError(f"non-finite polygon point {p!r}")
        xs.append(float(x))
        ys.append(float(y))
    return PixelBox(min(xs), min(ys), max(xs), max(ys))
