"""Synthetic induration phantoms with exact ground truth.

A phantom is a filled ellipse (circle by default) of known millimeter
diameter rendered on a uniform background, with a constant depth frame and
the exact rasterized ellipse as ground-truth mask. Pixel size follows the
pinhole model: at capture depth ``d`` the ellipse spans

    true_diameter_mm * px_per_mm_at_calibrated_depth * (calibrated_depth / d)

pixels, so moving the camera away shrinks the phantom proportionally.
A pixel belongs to the ellipse when its center (integer lattice point)
satisfies the ellipse equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import CalibrationTable, DEFAULT_TABLE
from .raster import DepthFrame, Raster
from .segment import SegmentationMask

#: Reference capture distance the calibration table was measured at.
CALIBRATED_DEPTH_MM = 219.5

#: Scale making a 10 mm induration span 10/0.1523 px at the calibrated depth.
DEFAULT_PX_PER_MM = 1.0 / 0.1523

DEFAULT_BACKGROUND = (205, 178, 160)
DEFAULT_INDURATION = (148, 82, 74)


@dataclass(frozen=True)
class PhantomSpec:
    true_diameter_mm: float
    depth_mm: float
    px_per_mm_at_calibrated_depth: float = DEFAULT_PX_PER_MM
    calibrated_depth_mm: float = CALIBRATED_DEPTH_MM
    side_px: int = 450
    background_color: tuple[int, int, int] = DEFAULT_BACKGROUND
    induration_color: tuple[int, int, int] = DEFAULT_INDURATION
    center_x: float | None = None  # None -> geometric image center
    center_y: float | None = None
    aspect_ratio: float = 1.0  # vertical/horizontal radius; 1 = circle

    def __post_init__(self):
        if self.true_diameter_mm <= 0 or self.depth_mm <= 0:
            raise ValueError("diameter and depth must be positive")
        if self.px_per_mm_at_calibrated_depth <= 0 or self.calibrated_depth_mm <= 0:
            raise ValueError("calibration scale and depth must be positive")
        if self.side_px < 1:
            raise ValueError("image side must be positive")
        if self.aspect_ratio <= 0:
            raise ValueError("aspect ratio must be positive")

    @property
    def pixel_diameter(self) -> float:
        """Rendered horizontal pixel diameter under the pinhole model."""
        return (
            self.true_diameter_mm
            * self.px_per_mm_at_calibrated_depth
            * (self.calibrated_depth_mm / self.depth_mm)
        )

    @property
    def center(self) -> tuple[float, float]:
        mid = (self.side_px - 1) / 2.0
        cx = self.center_x if self.center_x is not None else mid
        cy = self.center_y if self.center_y is not None else mid
        return cx, cy


def generate_phantom(spec: PhantomSpec) -> tuple[Raster, DepthFrame, SegmentationMask]:
    """Render a phantom; returns (image, constant depth frame, exact mask).

    Raises:
        ValueError: the ellipse does not fit inside the image.
    """
    rx = spec.pixel_diameter / 2.0
    ry = rx * spec.aspect_ratio
    cx, cy = spec.center
    side = spec.side_px
    if cx - rx < 0 or cx + rx > side - 1 or cy - ry < 0 or cy + ry > side - 1:
        raise ValueError(
            f"ellipse (center {cx:.1f},{cy:.1f}, radii {rx:.1f}x{ry:.1f}) "
            f"exceeds the {side}x{side} image"
        )
    yy, xx = np.ogrid[:side, :side]
    inside = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0

    pixels = np.empty((side, side, 3), dtype=np.uint8)
    pixels[:] = np.array(spec.background_color, dtype=np.uint8)
    pixels[inside] = np.array(spec.induration_color, dtype=np.uint8)

    depth_value = int(round(spec.depth_mm))
    if not 0 <= depth_value <= 0xFFFF:
        raise ValueError(f"depth {spec.depth_mm} mm outside the uint16 range")
    depths = np.full((side, side), depth_value, dtype=np.uint16)

    return Raster(pixels), DepthFrame(depths), SegmentationMask(inside)


def consistent_scale(
    true_mm: float, table: CalibrationTable = DEFAULT_TABLE
) -> float | None:
    """Scale (px/mm at calibrated depth) that is self-consistent with the
    table for this size: the rendered diameter ``true_mm / factor`` falls in
    the very band that owns ``factor``. Returns None when no band qualifies.
    """
    for band in table.bands:
        px = true_mm / band.factor
        if band.px_lo <= px < band.px_hi or (
            band is table.bands[-1] and px == band.px_hi
        ):
            return 1.0 / band.factor
    return None
