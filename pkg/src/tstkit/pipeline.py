"""End-to-end measurement pipeline shared by the CLI and the HTTP service.

Composes preprocessing, segmentation (external mask or classical), and the
chord measurement into one call.
"""

from __future__ import annotations

from dataclasses import dataclass

from .measure import CalibrationTable, ChordMeasurement, DEFAULT_TABLE, measure
from .raster import Point, Raster, denoise, enhance_contrast
from .segment import SegmentationMask, segment_classical


@dataclass(frozen=True)
class PipelineResult:
    measurement: ChordMeasurement
    mask: SegmentationMask
    preprocessed: Raster


def run_measurement_pipeline(
    raster: Raster,
    *,
    mask: SegmentationMask | None = None,
    roi_center: Point | None = None,
    roi_radius: int | None = None,
    table: CalibrationTable = DEFAULT_TABLE,
    preprocess: bool = True,
) -> PipelineResult:
    """Measure an induration image.

    When ``mask`` is given it is used as-is (the external-model route);
    otherwise the classical segmenter runs over the ROI, which defaults to
    a centered circle spanning 90% of the smaller image dimension.

    Raises:
        DegenerateMaskError: segmentation yields fewer than 2 boundary pixels.
        CalibrationRangeError: the chord exceeds the calibrated range.
        OutOfBoundsError: the ROI does not fit the image.
    """
    processed = enhance_contrast(denoise(raster)) if preprocess else raster
    if mask is None:
        if roi_center is None:
            roi_center = Point(raster.width // 2, raster.height // 2)
        if roi_radius is None:
            roi_radius = int(min(raster.width, raster.height) * 0.45)
        mask = segment_classical(processed, roi_center, roi_radius)
    measurement = measure(mask, table)
    return PipelineResult(measurement=measurement, mask=mask, preprocessed=processed)
