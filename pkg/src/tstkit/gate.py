"""Auto-capture gating over timestamped sensor samples.

The capture protocol takes a stream of samples (depth at the guide center,
device pitch/roll, and the tracked induration candidate) and fires an
auto-capture decision once every gate predicate has held for a configured
number of consecutive samples:

  depth panel        depth within [depth_min_mm, depth_max_mm], inclusive
  orientation panel  |pitch| and |roll| within their tolerances
  guide alignment    candidate center inside the inner guide circle and
                     candidate radius no larger than the outer guide circle

The state machine is deterministic and terminal: once a capture is emitted
the stream is done.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import GateTerminalError, StreamParseError
from .raster import Point


class CaptureDecision(Enum):
    NO_CAPTURE = "NoCapture"
    CAPTURE = "Capture"


@dataclass(frozen=True)
class SensorSample:
    """One reading from the capture loop.

    ``depth_mm`` is the depth at the guide center pixel, 0 when the sensor
    has no depth there. The candidate fields describe the tracked induration
    outline and may be absent when tracking has not locked on.
    """

    timestamp_ms: int
    depth_mm: int
    pitch_deg: float
    roll_deg: float
    candidate_center: Point | None = None
    candidate_radius_px: float | None = None

    def __post_init__(self):
        if (self.candidate_center is None) != (self.candidate_radius_px is None):
            raise ValueError("candidate center and radius must be given together")
        if self.candidate_radius_px is not None and self.candidate_radius_px <= 0:
            raise ValueError("candidate radius must be positive")
        if self.depth_mm < 0:
            raise ValueError("depth must be non-negative")


@dataclass(frozen=True)
class GateConfig:
    guide_center: Point
    guide_inner_radius_px: float
    guide_outer_radius_px: float
    depth_min_mm: int = 175
    depth_max_mm: int = 400
    pitch_tolerance_deg: float = 2.0
    roll_tolerance_deg: float = 2.0
    required_consecutive: int = 5

    def __post_init__(self):
        if self.depth_min_mm >= self.depth_max_mm:
            raise ValueError("depth_min_mm must be below depth_max_mm")
        if self.pitch_tolerance_deg <= 0 or self.roll_tolerance_deg <= 0:
            raise ValueError("orientation tolerances must be positive")
        if not (0 < self.guide_inner_radius_px < self.guide_outer_radius_px):
            raise ValueError("require 0 < inner guide radius < outer guide radius")
        if self.required_consecutive < 1:
            raise ValueError("required_consecutive must be at least 1")

    def to_dict(self) -> dict:
        return {
            "guide_center": self.guide_center.to_dict(),
            "guide_inner_radius_px": self.guide_inner_radius_px,
            "guide_outer_radius_px": self.guide_outer_radius_px,
            "depth_min_mm": self.depth_min_mm,
            "depth_max_mm": self.depth_max_mm,
            "pitch_tolerance_deg": self.pitch_tolerance_deg,
            "roll_tolerance_deg": self.roll_tolerance_deg,
            "required_consecutive": self.required_consecutive,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GateConfig":
        d = dict(d)
        center = d.pop("guide_center")
        return cls(guide_center=Point(int(center["x"]), int(center["y"])), **d)


#: Defaults sized for the 450x450 capture crop.
DEFAULT_GATE_CONFIG = GateConfig(
    guide_center=Point(225, 225),
    guide_inner_radius_px=60.0,
    guide_outer_radius_px=160.0,
)


@dataclass(frozen=True)
class GatePanelStatus:
    depth_ok: bool
    orientation_ok: bool
    alignment_ok: bool
    all_ok: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "all_ok", self.depth_ok and self.orientation_ok and self.alignment_ok
        )

    def to_dict(self) -> dict:
        return {
            "depth_ok": self.depth_ok,
            "orientation_ok": self.orientation_ok,
            "alignment_ok": self.alignment_ok,
            "all_ok": self.all_ok,
        }


@dataclass(frozen=True)
class GateState:
    consecutive_passes: int = 0
    captured: bool = False


def evaluate_sample(cfg: GateConfig, s: SensorSample) -> GatePanelStatus:
    """Evaluate the three gate panels for one sample.

    Boundary values are inclusive on every predicate. A missing candidate
    simply fails the alignment panel; it is not an error.
    """
    depth_ok = cfg.depth_min_mm <= s.depth_mm <= cfg.depth_max_mm
    orientation_ok = (
        abs(s.pitch_deg) <= cfg.pitch_tolerance_deg
        and abs(s.roll_deg) <= cfg.roll_tolerance_deg
    )
    if s.candidate_center is None:
        alignment_ok = False
    else:
        off = math.hypot(
            s.candidate_center.x - cfg.guide_center.x,
            s.candidate_center.y - cfg.guide_center.y,
        )
        alignment_ok = (
            off <= cfg.guide_inner_radius_px
            and s.candidate_radius_px <= cfg.guide_outer_radius_px
        )
    return GatePanelStatus(depth_ok, orientation_ok, alignment_ok)


def step(
    state: GateState, cfg: GateConfig, s: SensorSample
) -> tuple[GateState, CaptureDecision]:
    """Advance the auto-capture state machine by one sample.

    A passing sample increments the consecutive-pass counter, a failing one
    resets it; Capture is emitted exactly when the counter reaches
    ``required_consecutive``, after which the state is terminal.

    Raises:
        GateTerminalError: stepping a state that has already captured.
    """
    if state.captured:
        raise GateTerminalError("gate already captured; state is terminal")
    if evaluate_sample(cfg, s).all_ok:
        passes = state.consecutive_passes + 1
    else:
        passes = 0
    if passes >= cfg.required_consecutive:
        return GateState(passes, captured=True), CaptureDecision.CAPTURE
    return GateState(passes), CaptureDecision.NO_CAPTURE


def run_stream(
    cfg: GateConfig, samples: list[SensorSample]
) -> list[tuple[SensorSample, GatePanelStatus, CaptureDecision]]:
    """Feed a whole stream through the state machine.

    Returns one (sample, panel status, decision) row per consumed sample;
    stops at the first Capture.
    """
    state = GateState()
    trace = []
    for s in samples:
        status = evaluate_sample(cfg, s)
        state, decision = step(state, cfg, s)
        trace.append((s, status, decision))
        if decision is CaptureDecision.CAPTURE:
            break
    return trace


def parse_stream(text: str) -> list[SensorSample]:
    """Parse the newline-delimited sensor record format used by the CLI.

    Each non-empty, non-comment line is either

        timestamp_ms depth_mm pitch_deg roll_deg

    or, when a tracked candidate is present,

        timestamp_ms depth_mm pitch_deg roll_deg cx cy radius_px

    Fields are whitespace separated; lines beginning with '#' are skipped.
    Timestamps must be non-decreasing.

    Raises:
        StreamParseError: on any malformed line, naming its line number.
    """
    samples: list[SensorSample] = []
    last_ts: int | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (4, 7):
            raise StreamParseError(
                f"expected 4 or 7 fields, got {len(parts)}", line_no
            )
        try:
            ts = int(parts[0])
            depth = int(parts[1])
            pitch = float(parts[2])
            roll = float(parts[3])
            if len(parts) == 7:
                center = Point(int(parts[4]), int(parts[5]))
                radius = float(parts[6])
            else:
                center, radius = None, None
        except ValueError as exc:
            raise StreamParseError(str(exc), line_no) from exc
        if last_ts is not None and ts < last_ts:
            raise StreamParseError(
                f"timestamp {ts} decreases (previous {last_ts})", line_no
            )
        last_ts = ts
        try:
            samples.append(
                SensorSample(ts, depth, pitch, roll, center, radius)
            )
        except ValueError as exc:
            raise StreamParseError(str(exc), line_no) from exc
    return samples
