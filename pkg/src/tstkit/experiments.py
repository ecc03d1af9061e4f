"""Depth-sweep and scalar-factor experiments on synthetic phantoms.

Both experiments drive the full measurement path (render phantom ->
classical segmentation -> maximum chord -> calibration) and are seeded, so
reports reproduce bit-for-bit for a given seed.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, replace

from .errors import DegenerateMaskError, TstKitError
from .measure import CalibrationTable, DEFAULT_TABLE, max_chord, extract_boundary
from .phantom import (
    CALIBRATED_DEPTH_MM,
    DEFAULT_PX_PER_MM,
    PhantomSpec,
    consistent_scale,
    generate_phantom,
)
from .raster import Point
from .segment import segment_classical

#: ROI circle handed to the classical segmenter; generous enough to contain
#: every sweep phantom while staying inside the 450 px frame.
DEFAULT_ROI_RADIUS = 200


@dataclass(frozen=True)
class SweepRow:
    depth_mm: float
    measured_mm: float | None
    error_mm: float | None
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "depth_mm": self.depth_mm,
            "measured_mm": self.measured_mm,
            "error_mm": self.error_mm,
            "note": self.note,
        }


@dataclass(frozen=True)
class SweepReport:
    true_mm: float
    seed: int
    n_trials: int
    rows: tuple[SweepRow, ...]  # sorted by depth
    best_depths: tuple[float, ...]  # depths minimizing |error|

    def summary_dict(self) -> dict:
        return {
            "experiment": "depth-sweep",
            "true_mm": self.true_mm,
            "seed": self.seed,
            "n_trials": self.n_trials,
            "best_depths_mm": list(self.best_depths),
            "best_depth_range_mm": (
                [min(self.best_depths), max(self.best_depths)]
                if self.best_depths
                else None
            ),
            "rows": [r.to_dict() for r in self.rows],
        }


@dataclass(frozen=True)
class ScalarFitResult:
    true_mm: float
    seed: int
    n_trials: int
    fitted_factor: float  # mean(true_mm / measured_px)
    mean_measured_px: float
    measured_px: tuple[float, ...]

    def summary_dict(self) -> dict:
        return {
            "experiment": "scalar-fit",
            "true_mm": self.true_mm,
            "seed": self.seed,
            "n_trials": self.n_trials,
            "fitted_factor": self.fitted_factor,
            "mean_measured_px": self.mean_measured_px,
            "measured_px": list(self.measured_px),
        }


def _base_spec(true_mm: float, px_per_mm: float | None, side_px: int) -> PhantomSpec:
    scale = px_per_mm if px_per_mm is not None else (
        consistent_scale(true_mm) or DEFAULT_PX_PER_MM
    )
    return PhantomSpec(
        true_diameter_mm=true_mm,
        depth_mm=CALIBRATED_DEPTH_MM,
        px_per_mm_at_calibrated_depth=scale,
        side_px=side_px,
    )


def _measure_phantom_px(spec: PhantomSpec, roi_radius: int) -> float:
    """Render and run the classical segmentation + chord path; pixel result."""
    raster, _, _ = generate_phantom(spec)
    center = Point(spec.side_px // 2, spec.side_px // 2)
    mask = segment_classical(raster, center, roi_radius)
    if mask.pixel_count == 0:
        raise DegenerateMaskError(
            f"segmentation found nothing at depth {spec.depth_mm} mm"
        )
    _, _, d_px = max_chord(extract_boundary(mask))
    return d_px


def _jitter(rng: random.Random, spec: PhantomSpec) -> PhantomSpec:
    cx, cy = spec.center
    return replace(
        spec,
        center_x=cx + rng.uniform(-0.5, 0.5),
        center_y=cy + rng.uniform(-0.5, 0.5),
    )


def run_depth_sweep(
    true_mm: float,
    depths: list[float],
    table: CalibrationTable = DEFAULT_TABLE,
    *,
    seed: int,
    n_trials: int = 10,
    px_per_mm: float | None = None,
    side_px: int = 450,
    roi_radius: int = DEFAULT_ROI_RADIUS,
) -> SweepReport:
    """Measure one phantom size across capture depths.

    Per depth, ``n_trials`` phantoms are measured (the first centered, later
    ones with sub-pixel center jitter) and the mean millimeter result
    recorded; depths whose |error| is minimal are reported as best.
    Measurement failures are recorded on their row rather than aborting the
    sweep.
    """
    if not depths:
        raise ValueError("depth list must be non-empty")
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    rng = random.Random(seed)
    base = _base_spec(true_mm, px_per_mm, side_px)
    rows = []
    for depth in sorted(depths):
        spec = replace(base, depth_mm=depth)
        values = []
        note = None
        for trial in range(n_trials):
            trial_spec = spec if trial == 0 else _jitter(rng, spec)
            try:
                d_px = _measure_phantom_px(trial_spec, roi_radius)
                values.append(d_px * table.factor_for(d_px))
            except (TstKitError, ValueError) as exc:
                note = f"trial {trial}: {exc}"
        if values:
            measured = statistics.fmean(values)
            rows.append(SweepRow(depth, measured, measured - true_mm, note))
        else:
            rows.append(SweepRow(depth, None, None, note))
    errors = [abs(r.error_mm) for r in rows if r.error_mm is not None]
    if errors:
        best = min(errors)
        best_depths = tuple(
            r.depth_mm for r in rows if r.error_mm is not None and abs(r.error_mm) == best
        )
    else:
        best_depths = ()
    return SweepReport(true_mm, seed, n_trials, tuple(rows), best_depths)


def run_scalar_fit(
    true_mm: float,
    n_trials: int,
    *,
    seed: int,
    px_per_mm: float | None = None,
    side_px: int = 450,
    roi_radius: int = DEFAULT_ROI_RADIUS,
) -> ScalarFitResult:
    """Fit the mm/px scalar for one phantom size at the calibrated depth.

    Renders ``n_trials`` phantoms (the first centered, later ones jittered
    sub-pixel), measures their pixel diameters, and returns
    ``mean(true_mm / measured_px)``. Any segmentation failure aborts with a
    diagnostic, since a partial fit would silently bias the factor.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    rng = random.Random(seed)
    base = _base_spec(true_mm, px_per_mm, side_px)
    measured: list[float] = []
    for trial in range(n_trials):
        spec = base if trial == 0 else _jitter(rng, base)
        try:
            measured.append(_measure_phantom_px(spec, roi_radius))
        except TstKitError as exc:
            raise DegenerateMaskError(
                f"scalar fit trial {trial} failed for {true_mm} mm phantom: {exc}"
            ) from exc
    fitted = statistics.fmean(true_mm / px for px in measured)
    return ScalarFitResult(
        true_mm=true_mm,
        seed=seed,
        n_trials=n_trials,
        fitted_factor=fitted,
        mean_measured_px=statistics.fmean(measured),
        measured_px=tuple(measured),
    )
