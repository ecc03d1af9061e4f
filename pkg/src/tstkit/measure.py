"""Induration diameter measurement.

The measured quantity is the longest straight segment between two boundary
pixels of the segmentation mask (the maximum chord). Boundary pixels are
mask pixels with at least one off-mask 4-neighbor; pixels on the image
border count. The chord search runs on the convex hull with rotating
calipers, exact in integer arithmetic, so it agrees bit-for-bit with an
all-pairs scan. Pixel lengths convert to millimeters through a piecewise
calibration table keyed on the pixel diameter itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CalibrationRangeError, DegenerateMaskError, FileReadError, InputError
from .raster import Point
from .segment import SegmentationMask


@dataclass(frozen=True)
class BoundarySet:
    """Boundary pixels of a mask, in row-major scan order."""

    points: tuple[Point, ...]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CalibrationBand:
    """Half-open pixel-diameter band [px_lo, px_hi) with its mm/px factor.

    The table's top band additionally includes its upper endpoint.
    """

    px_lo: float
    px_hi: float
    factor: float

    def __post_init__(self):
        if self.px_lo < 0 or self.px_hi <= self.px_lo:
            raise ValueError("band bounds must satisfy 0 <= px_lo < px_hi")
        if self.factor <= 0:
            raise ValueError("band factor must be positive")


@dataclass(frozen=True)
class CalibrationTable:
    bands: tuple[CalibrationBand, ...]

    def __post_init__(self):
        if not self.bands:
            raise ValueError("calibration table needs at least one band")
        if self.bands[0].px_lo != 0:
            raise ValueError("first band must start at 0 px")
        for prev, cur in zip(self.bands, self.bands[1:]):
            if cur.px_lo != prev.px_hi:
                raise ValueError("bands must be contiguous and ascending")

    @property
    def px_max(self) -> float:
        return self.bands[-1].px_hi

    def factor_for(self, d_px: float) -> float:
        """Factor of the band containing ``d_px``; the top band is closed.

        Raises:
            CalibrationRangeError: ``d_px`` above the top band.
        """
        if d_px < 0:
            raise ValueError("pixel diameter must be non-negative")
        for band in self.bands:
            if band.px_lo <= d_px < band.px_hi:
                return band.factor
        if d_px == self.px_max:
            return self.bands[-1].factor
        raise CalibrationRangeError(
            f"diameter {d_px:.3f} px exceeds the calibrated range "
            f"(max {self.px_max:g} px)"
        )

    def to_dict(self) -> dict:
        return {
            "bands": [
                {"px_lo": b.px_lo, "px_hi": b.px_hi, "factor": b.factor}
                for b in self.bands
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationTable":
        try:
            bands = tuple(
                CalibrationBand(float(b["px_lo"]), float(b["px_hi"]), float(b["factor"]))
                for b in d["bands"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad calibration table: {exc}") from exc
        return cls(bands)

    @classmethod
    def load(cls, path: str | Path) -> "CalibrationTable":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileReadError(f"cannot read {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from exc


#: Calibration measured for the reference capture distance. Pixel diameters
#: below 50 px use 0.1197 mm/px, 50-80 px use 0.1523, 80-200 px use 0.1499;
#: anything above 200 px is outside the calibrated range.
DEFAULT_TABLE = CalibrationTable(
    (
        CalibrationBand(0.0, 50.0, 0.1197),
        CalibrationBand(50.0, 80.0, 0.1523),
        CalibrationBand(80.0, 200.0, 0.1499),
    )
)


@dataclass(frozen=True)
class ChordMeasurement:
    """Endpoints and length of the maximum chord, in px and mm."""

    p1: Point
    p2: Point
    diameter_px: float
    diameter_mm: float
    factor_used: float

    def to_dict(self, display: bool = False) -> dict:
        """JSON form; ``display=True`` rounds millimeters to 2 decimals."""
        mm = round(self.diameter_mm, 2) if display else self.diameter_mm
        return {
            "p1": self.p1.to_dict(),
            "p2": self.p2.to_dict(),
            "diameter_px": self.diameter_px,
            "factor": self.factor_used,
            "diameter_mm": mm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChordMeasurement":
        return cls(
            p1=Point(int(d["p1"]["x"]), int(d["p1"]["y"])),
            p2=Point(int(d["p2"]["x"]), int(d["p2"]["y"])),
            diameter_px=float(d["diameter_px"]),
            diameter_mm=float(d["diameter_mm"]),
            factor_used=float(d["factor"]),
        )


def extract_boundary(mask: SegmentationMask) -> BoundarySet:
    """Boundary pixels: mask pixels with at least one off-mask 4-neighbor.

    Mask pixels on the image border always qualify. Equivalent to the mask
    minus its 4-connected erosion. An empty mask yields an empty set.
    """
    bits = mask.bits
    padded = np.pad(bits, 1, mode="constant", constant_values=False)
    interior = (
        bits
        & padded[:-2, 1:-1]  # up
        & padded[2:, 1:-1]  # down
        & padded[1:-1, :-2]  # left
        & padded[1:-1, 2:]  # right
    )
    boundary = bits & ~interior
    ys, xs = np.nonzero(boundary)
    return BoundarySet(tuple(Point(int(x), int(y)) for y, x in zip(ys, xs)))


def _cross(o: tuple, a: tuple, b: tuple) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain convex hull in CCW order, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _antipodal_pairs(hull: list[tuple[int, int]]) -> list[tuple[tuple, tuple]]:
    """All antipodal vertex pairs of a strictly convex CCW polygon."""
    n = len(hull)
    if n == 2:
        return [(hull[0], hull[1])]
    pairs = []
    i, j = 0, 1
    while i < j:
        while True:
            pairs.append((hull[i], hull[j]))
            jn = (j + 1) % n
            edge_j = (hull[jn][0] - hull[j][0], hull[jn][1] - hull[j][1])
            edge_i = (hull[i + 1][0] - hull[i][0], hull[i + 1][1] - hull[i][1])
            if edge_j[0] * edge_i[1] - edge_j[1] * edge_i[0] >= 0:
                break
            j = jn
        i += 1
    return pairs


def max_chord(boundary: BoundarySet) -> tuple[Point, Point, float]:
    """Longest segment between two boundary points.

    Computed as the diameter of the convex hull via rotating calipers;
    squared distances stay in integer arithmetic, so the result matches an
    exhaustive all-pairs scan exactly. Equal-length chords resolve to the
    lexicographically smallest endpoint pair, ordering points by (x, y) and
    the pair so that p1 <= p2.

    Raises:
        DegenerateMaskError: fewer than two boundary points.
    """
    pts = [(p.x, p.y) for p in boundary.points]
    if len(set(pts)) < 2:
        raise DegenerateMaskError(
            f"need at least 2 distinct boundary points, have {len(set(pts))}"
        )
    hull = convex_hull(pts)
    best_d2 = -1
    best_pair: tuple[tuple, tuple] | None = None
    for a, b in _antipodal_pairs(hull):
        if a > b:
            a, b = b, a
        d2 = (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2
        if d2 > best_d2 or (d2 == best_d2 and (a, b) < best_pair):
            best_d2 = d2
            best_pair = (a, b)
    (x1, y1), (x2, y2) = best_pair
    return Point(x1, y1), Point(x2, y2), math.sqrt(best_d2)


def px_to_mm(d_px: float, table: CalibrationTable = DEFAULT_TABLE) -> tuple[float, float]:
    """Convert a pixel diameter to millimeters.

    Returns (mm, factor) where factor is the mm/px value of the band
    containing ``d_px``.

    Raises:
        CalibrationRangeError: ``d_px`` above the calibrated range.
    """
    factor = table.factor_for(d_px)
    return d_px * factor, factor


def measure(
    mask: SegmentationMask, table: CalibrationTable = DEFAULT_TABLE
) -> ChordMeasurement:
    """Measure a mask: extract the boundary, take the maximum chord, convert
    to millimeters.

    The mask is measured as given; callers that may hold multi-blob masks
    should isolate the induration with ``largest_component`` first.

    Raises:
        DegenerateMaskError: fewer than two boundary points.
        CalibrationRangeError: chord longer than the calibrated range.
    """
    p1, p2, d_px = max_chord(extract_boundary(mask))
    mm, factor = px_to_mm(d_px, table)
    return ChordMeasurement(p1, p2, d_px, mm, factor)
