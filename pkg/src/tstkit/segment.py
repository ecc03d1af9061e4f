"""Induration segmentation and overlay rendering.

Two routes produce a binary mask: a deterministic classical pipeline
(BT.601 grayscale -> Otsu threshold over a circular ROI -> largest
8-connected component of the darker side), and ingestion of a mask PNG
produced by any external model. Detection quality on the classical route
depends on distinct contrast between induration and surrounding skin; a
contrast-free ROI yields the empty mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import (
    CorruptStreamError,
    DimensionMismatchError,
    FileReadError,
    OutOfBoundsError,
    UnsupportedFormatError,
)
from .raster import Point, Raster, luma_u8

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class SegmentationMask:
    """Binary induration map backed by an ``(height, width)`` bool array."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValueError("mask must be a 2D array of at least 1x1")
        if b.dtype != np.bool_:
            raise ValueError("mask bits must be boolean")
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def pixel_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SegmentationMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )

    @classmethod
    def empty(cls, width: int, height: int) -> "SegmentationMask":
        return cls(np.zeros((height, width), dtype=bool))


@dataclass(frozen=True)
class OverlayStyle:
    """Blend fraction and color for mask overlays."""

    alpha: float
    segment_color: tuple[int, int, int]

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be within [0, 1]")
        if len(self.segment_color) != 3 or any(
            not 0 <= c <= 255 for c in self.segment_color
        ):
            raise ValueError("segment_color must be an 8-bit RGB triple")


#: The two overlay versions shown during capture review.
SEMI_TRANSPARENT = OverlayStyle(alpha=0.5, segment_color=(220, 20, 60))
OPAQUE = OverlayStyle(alpha=1.0, segment_color=(220, 20, 60))


def otsu_threshold(values: np.ndarray) -> int | None:
    """Otsu threshold over 8-bit values: maximize between-class variance for
    the split [0..t] vs [t+1..255]. Returns None when fewer than two gray
    levels are present; variance ties resolve to the smallest t.
    """
    hist = np.bincount(np.asarray(values, dtype=np.uint8).ravel(), minlength=256)
    if np.count_nonzero(hist) < 2:
        return None
    hist = hist.astype(np.float64)
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    w1 = w0[-1] - w0
    s0 = np.cumsum(hist * levels)
    valid = (w0 > 0) & (w1 > 0)
    mu0 = np.divide(s0, w0, out=np.zeros_like(s0), where=valid)
    mu1 = np.divide(s0[-1] - s0, w1, out=np.zeros_like(s0), where=valid)
    between = np.where(valid, w0 * w1 * (mu0 - mu1) ** 2, -1.0)
    return int(np.argmax(between))


def segment_classical(
    raster: Raster,
    roi_center: Point,
    roi_radius: int,
    darker: bool = True,
) -> SegmentationMask:
    """Deterministic reference segmentation of the induration inside a ROI.

    Grayscale (BT.601) -> Otsu threshold computed over the ROI pixels ->
    pixels on the ``darker`` side of the threshold inside the ROI form the
    candidates -> largest 8-connected component. Returns the empty mask when
    the ROI has no gray-level contrast or no candidate pixels.

    Raises:
        OutOfBoundsError: the ROI circle does not lie within the image.
    """
    if roi_radius <= 0:
        raise ValueError("roi radius must be positive")
    w, h = raster.width, raster.height
    if (
        roi_center.x - roi_radius < 0
        or roi_center.y - roi_radius < 0
        or roi_center.x + roi_radius > w - 1
        or roi_center.y + roi_radius > h - 1
    ):
        raise OutOfBoundsError(
            f"ROI circle at ({roi_center.x},{roi_center.y}) r={roi_radius} "
            f"exceeds {w}x{h} image"
        )
    gray = luma_u8(raster)
    yy, xx = np.ogrid[:h, :w]
    roi = (xx - roi_center.x) ** 2 + (yy - roi_center.y) ** 2 <= roi_radius**2
    threshold = otsu_threshold(gray[roi])
    if threshold is None:
        return SegmentationMask.empty(w, h)
    if darker:
        candidates = roi & (gray <= threshold)
    else:
        candidates = roi & (gray > threshold)
    return largest_component(SegmentationMask(candidates))


def largest_component(mask: SegmentationMask) -> SegmentationMask:
    """Keep only the largest 8-connected component.

    Size ties resolve to the component whose first pixel comes earliest in
    row-major order. The empty mask maps to itself.
    """
    labels, count = ndimage.label(mask.bits, structure=_EIGHT_CONNECTED)
    if count == 0:
        return SegmentationMask.empty(mask.width, mask.height)
    flat = labels.ravel()
    sizes = np.bincount(flat, minlength=count + 1)
    first_index = np.full(count + 1, flat.size, dtype=np.int64)
    np.minimum.at(first_index, flat, np.arange(flat.size))
    best = min(
        range(1, count + 1), key=lambda lab: (-int(sizes[lab]), int(first_index[lab]))
    )
    return SegmentationMask(labels == best)


def ingest_mask(path: str | Path, expected_w: int, expected_h: int) -> SegmentationMask:
    """Load an externally produced mask: 8-bit grayscale PNG, binarized at 128.

    Raises:
        FileReadError / CorruptStreamError / UnsupportedFormatError: bad file.
        DimensionMismatchError: mask size differs from the expected raster.
    """
    try:
        f = open(path, "rb")
    except OSError as exc:
        raise FileReadError(f"cannot read {path}: {exc}") from exc
    with f:
        try:
            im = Image.open(f)
            im.load()
        except UnidentifiedImageError as exc:
            raise CorruptStreamError(f"{path}: not a decodable image: {exc}") from exc
        except OSError as exc:
            raise CorruptStreamError(f"{path}: corrupt image stream: {exc}") from exc
        if im.format != "PNG" or im.mode != "L":
            raise UnsupportedFormatError(
                f"{path}: mask must be an 8-bit grayscale PNG (got {im.format}/{im.mode})"
            )
        arr = np.asarray(im, dtype=np.uint8)
    if arr.shape != (expected_h, expected_w):
        raise DimensionMismatchError(
            f"{path}: mask is {arr.shape[1]}x{arr.shape[0]}, "
            f"expected {expected_w}x{expected_h}"
        )
    return SegmentationMask(arr >= 128)


def save_mask(mask: SegmentationMask, path: str | Path) -> None:
    """Write a mask as an 8-bit grayscale PNG: 0 background, 255 induration."""
    arr = np.where(mask.bits, 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def render_overlay(
    raster: Raster, mask: SegmentationMask, style: OverlayStyle
) -> Raster:
    """Blend the segment color over masked pixels.

    Inside the mask each channel becomes
    ``round(alpha * segment_color + (1 - alpha) * original)`` (half rounds
    up); pixels outside the mask are untouched.

    Raises:
        DimensionMismatchError: raster and mask dimensions differ.
    """
    if (raster.height, raster.width) != (mask.height, mask.width):
        raise DimensionMismatchError(
            f"raster {raster.width}x{raster.height} vs mask {mask.width}x{mask.height}"
        )
    out = raster.pixels.copy()
    color = np.array(style.segment_color, dtype=np.float64)
    blended = np.floor(
        style.alpha * color + (1.0 - style.alpha) * raster.pixels.astype(np.float64) + 0.5
    )
    out[mask.bits] = np.clip(blended, 0, 255).astype(np.uint8)[mask.bits]
    return Raster(out)
