"""Image and depth-frame primitives.

Provides the RGB raster and millimeter depth-frame types used throughout the
pipeline, PNG and DPTH file I/O, the preprocessing steps applied before
segmentation (median denoise, luma histogram equalization), center cropping,
and per-pixel millimeter depth lookup.

DPTH is a tiny raw format for depth frames:

    bytes 0..3   ASCII "DPTH"
    bytes 4..7   width,  uint32 little-endian
    bytes 8..11  height, uint32 little-endian
    then         width*height uint16 little-endian millimeter values, row-major

A stored depth of 0 means "no depth available" at that pixel.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from .errors import (
    BadMagicError,
    CorruptStreamError,
    FileReadError,
    OutOfBoundsError,
    SizeMismatchError,
    UnsupportedFormatError,
)

DPTH_MAGIC = b"DPTH"

# ITU-R BT.601 luma weights.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, order=True)
class Point:
    """Integer pixel coordinate: ``x`` is the column, ``y`` the row.

    Ordering is lexicographic on ``(x, y)``, which is the tie-break order used
    by the chord measurement.
    """

    x: int
    y: int

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}


@dataclass(frozen=True, eq=False)
class Raster:
    """8-bit RGB image backed by an ``(height, width, 3)`` uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError("raster pixels must have shape (height, width, 3)")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("raster dimensions must be at least 1x1")
        if px.dtype != np.uint8:
            raise ValueError("raster pixels must be uint8")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True, eq=False)
class DepthFrame:
    """Per-pixel depth in integer millimeters, aligned to a Raster.

    Backed by an ``(height, width)`` uint16 array; 0 marks pixels with no
    depth available.
    """

    depths: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.depths)
        if d.ndim != 2:
            raise ValueError("depth frame must have shape (height, width)")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError("depth frame dimensions must be at least 1x1")
        if d.dtype != np.uint16:
            raise ValueError("depth values must be uint16 millimeters")
        object.__setattr__(self, "depths", d)

    @property
    def width(self) -> int:
        return self.depths.shape[1]

    @property
    def height(self) -> int:
        return self.depths.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DepthFrame):
            return NotImplemented
        return self.depths.shape == other.depths.shape and bool(
            np.array_equal(self.depths, other.depths)
        )


def load_raster(path: str | Path) -> Raster:
    """Decode an 8-bit RGB or RGBA PNG file; alpha is discarded.

    Raises:
        FileReadError: the file cannot be opened.
        UnsupportedFormatError: not a PNG, or not 8-bit RGB/RGBA.
        CorruptStreamError: the stream fails to decode.
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
        if im.format != "PNG":
            raise UnsupportedFormatError(f"{path}: expected PNG, got {im.format}")
        if im.mode not in ("RGB", "RGBA"):
            raise UnsupportedFormatError(
                f"{path}: expected 8-bit RGB or RGBA data, got mode {im.mode}"
            )
        arr = np.asarray(im, dtype=np.uint8)
    return Raster(arr[:, :, :3].copy())


def save_raster(raster: Raster, path: str | Path) -> None:
    """Encode a raster as an 8-bit RGB PNG."""
    Image.fromarray(raster.pixels, mode="RGB").save(path, format="PNG")


def load_depth_frame(path: str | Path) -> DepthFrame:
    """Read a DPTH file (see module docstring for the layout).

    Raises:
        FileReadError: the file cannot be opened.
        BadMagicError: the magic bytes are not "DPTH".
        SizeMismatchError: header dimensions disagree with the payload size.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FileReadError(f"cannot read {path}: {exc}") from exc
    return decode_depth_frame(data, name=str(path))


def decode_depth_frame(data: bytes, name: str = "<bytes>") -> DepthFrame:
    if len(data) < 12:
        raise BadMagicError(f"{name}: too short for a DPTH header")
    magic, width, height = struct.unpack_from("<4sII", data, 0)
    if magic != DPTH_MAGIC:
        raise BadMagicError(f"{name}: bad magic {magic!r}, expected {DPTH_MAGIC!r}")
    if width < 1 or height < 1:
        raise SizeMismatchError(f"{name}: invalid dimensions {width}x{height}")
    expected = 12 + 2 * width * height
    if len(data) != expected:
        raise SizeMismatchError(
            f"{name}: header says {width}x{height} ({expected} bytes), file has {len(data)}"
        )
    depths = np.frombuffer(data, dtype="<u2", offset=12).reshape(height, width)
    return DepthFrame(depths.astype(np.uint16))


def encode_depth_frame(frame: DepthFrame) -> bytes:
    header = struct.pack("<4sII", DPTH_MAGIC, frame.width, frame.height)
    return header + frame.depths.astype("<u2").tobytes()


def save_depth_frame(frame: DepthFrame, path: str | Path) -> None:
    Path(path).write_bytes(encode_depth_frame(frame))


def get_millimeters_depth(frame: DepthFrame, p: Point) -> int | None:
    """Return the stored depth at ``p`` in millimeters, or None when no depth
    is available there (stored value 0).

    Lookup is nearest-pixel; no interpolation.

    Raises:
        OutOfBoundsError: ``p`` lies outside the frame.
    """
    if not (0 <= p.x < frame.width and 0 <= p.y < frame.height):
        raise OutOfBoundsError(
            f"point ({p.x},{p.y}) outside {frame.width}x{frame.height} depth frame"
        )
    value = int(frame.depths[p.y, p.x])
    return value if value != 0 else None


def luma_u8(raster: Raster) -> np.ndarray:
    """BT.601 luma of each pixel, rounded to uint8."""
    y = raster.pixels.astype(np.float64) @ _LUMA_WEIGHTS
    return np.clip(np.round(y), 0, 255).astype(np.uint8)


def denoise(raster: Raster) -> Raster:
    """3x3 per-channel median filter; edges use clamped-border replication."""
    out = ndimage.median_filter(raster.pixels, size=(3, 3, 1), mode="nearest")
    return Raster(out)


def enhance_contrast(raster: Raster) -> Raster:
    """Global histogram equalization on the BT.601 luma channel.

    The equalized luma is pushed back into RGB by scaling each pixel's
    channels by ``new_luma / old_luma``, which preserves chroma up to
    clipping. Pixels with zero luma have no chroma and become gray at the
    equalized level. Constant-luma images are returned unchanged.
    """
    luma = luma_u8(raster)
    hist = np.bincount(luma.ravel(), minlength=256)
    occupied = np.flatnonzero(hist)
    if occupied.size < 2:
        return Raster(raster.pixels.copy())

    cdf = np.cumsum(hist)
    total = int(cdf[-1])
    cdf_min = int(cdf[occupied[0]])
    # Standard equalization map: lowest occupied level -> 0, top -> 255.
    lut = np.round((cdf - cdf_min) / (total - cdf_min) * 255.0)
    lut = np.clip(lut, 0, 255)

    new_luma = lut[luma]
    old = luma.astype(np.float64)
    rgb = raster.pixels.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = np.where(old > 0, new_luma / np.maximum(old, 1e-12), 0.0)
    scaled = np.clip(np.floor(rgb * gain[:, :, None] + 0.5), 0, 255)
    gray = np.repeat(new_luma[:, :, None], 3, axis=2)
    out = np.where((old == 0)[:, :, None], gray, scaled)
    return Raster(out.astype(np.uint8))


def center_crop(raster: Raster, side: int) -> Raster:
    """Copy the centered ``side`` x ``side`` region.

    The top-left source offset is ``((width-side)//2, (height-side)//2)``;
    odd differences round the offset down.

    Raises:
        OutOfBoundsError: ``side`` exceeds either source dimension.
    """
    if side < 1:
        raise ValueError("crop side must be positive")
    if side > raster.width or side > raster.height:
        raise OutOfBoundsError(
            f"crop side {side} exceeds source {raster.width}x{raster.height}"
        )
    x0 = (raster.width - side) // 2
    y0 = (raster.height - side) // 2
    return Raster(raster.pixels[y0 : y0 + side, x0 : x0 + side].copy())
