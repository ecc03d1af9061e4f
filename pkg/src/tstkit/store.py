"""Local persistence for TST cases and follow-up reminders.

Records live in a single append-only UTF-8 file, one JSON object per line,
latest line winning per record id; this replaces any remote storage and
keeps tests hermetic. Binary artifacts (capture images, depth frames,
masks) are content-addressed under ``artifacts/<first two hex>/<sha256>.<ext>``
next to the record file. All timestamps are UTC in RFC 3339 text.

Writes are serialized by a single lock (single-writer contract); reads
snapshot under the same lock and hand out copies.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path

from .errors import (
    ConflictError,
    CorruptRecordError,
    DecisionConflictError,
    InvalidWindowError,
    NotFoundError,
    WriteFailureError,
)
from .interpret import Assessment, Questionnaire
from .measure import ChordMeasurement

RECORDS_FILENAME = "records.jsonl"
ARTIFACTS_DIRNAME = "artifacts"

#: Default follow-up window: the standard 48-72 h read interval after
#: administration. Configurable per reminder.
DEFAULT_READ_WINDOW_HOURS = (48.0, 72.0)


def format_utc(dt: datetime) -> str:
    """RFC 3339 text for a timezone-aware datetime, normalized to UTC."""
    if dt.tzinfo is None:
        raise ValueError("timestamps must be timezone-aware")
    return dt.astimezone(timezone.utc).isoformat()


def parse_utc(text: str) -> datetime:
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {text!r} lacks a timezone")
    return dt.astimezone(timezone.utc)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


class CaseStatus(Enum):
    AWAITING_READ = "awaiting_read"
    MEASURED = "measured"
    ASSESSED = "assessed"


@dataclass(frozen=True)
class CaptureArtifact:
    """One submitted capture: artifact paths are store-relative.

    ``accepted`` is tri-state: None until the clinician decides, then True
    (accepted) or False (retake requested).
    """

    capture_id: str
    image_path: str
    depth_path: str
    mask_path: str | None = None
    measurement: ChordMeasurement | None = None
    accepted: bool | None = None

    def to_dict(self) -> dict:
        return {
            "capture_id": self.capture_id,
            "image_path": self.image_path,
            "depth_path": self.depth_path,
            "mask_path": self.mask_path,
            "measurement": self.measurement.to_dict() if self.measurement else None,
            "accepted": self.accepted,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CaptureArtifact":
        return cls(
            capture_id=str(d["capture_id"]),
            image_path=str(d["image_path"]),
            depth_path=str(d["depth_path"]),
            mask_path=d.get("mask_path"),
            measurement=(
                ChordMeasurement.from_dict(d["measurement"])
                if d.get("measurement")
                else None
            ),
            accepted=d.get("accepted"),
        )


@dataclass(frozen=True)
class TstCase:
    case_id: str
    created_at: datetime
    administered_at: datetime
    questionnaire: Questionnaire | None = None
    captures: tuple[CaptureArtifact, ...] = ()
    assessment: Assessment | None = None
    status: CaseStatus = CaseStatus.AWAITING_READ
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.assessment is not None and self.status is not CaseStatus.ASSESSED:
            raise ValueError("a case with an assessment must be in assessed status")
        accepted = [c for c in self.captures if c.accepted]
        if len(accepted) > 1:
            raise ValueError("at most one accepted capture per case")

    @property
    def accepted_capture(self) -> CaptureArtifact | None:
        for c in self.captures:
            if c.accepted:
                return c
        return None

    def get_capture(self, capture_id: str) -> CaptureArtifact:
        for c in self.captures:
            if c.capture_id == capture_id:
                return c
        raise NotFoundError(f"capture {capture_id} not found in case {self.case_id}")

    def to_dict(self) -> dict:
        d = dict(self.extra)
        d.update(
            {
                "case_id": self.case_id,
                "created_at": format_utc(self.created_at),
                "administered_at": format_utc(self.administered_at),
                "questionnaire": (
                    self.questionnaire.to_dict() if self.questionnaire else None
                ),
                "captures": [c.to_dict() for c in self.captures],
                "assessment": self.assessment.to_dict() if self.assessment else None,
                "status": self.status.value,
            }
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TstCase":
        known = {
            "case_id",
            "created_at",
            "administered_at",
            "questionnaire",
            "captures",
            "assessment",
            "status",
        }
        return cls(
            case_id=str(d["case_id"]),
            created_at=parse_utc(d["created_at"]),
            administered_at=parse_utc(d["administered_at"]),
            questionnaire=(
                Questionnaire.from_dict(d["questionnaire"])
                if d.get("questionnaire")
                else None
            ),
            captures=tuple(CaptureArtifact.from_dict(c) for c in d.get("captures", [])),
            assessment=(
                Assessment.from_dict(d["assessment"]) if d.get("assessment") else None
            ),
            status=CaseStatus(d["status"]),
            extra={k: v for k, v in d.items() if k not in known},
        )


@dataclass(frozen=True)
class Reminder:
    reminder_id: str
    case_id: str
    window_start: datetime
    window_end: datetime
    acknowledged: bool = False

    def __post_init__(self):
        if self.window_start >= self.window_end:
            raise ValueError("reminder window start must precede its end")

    def to_dict(self) -> dict:
        return {
            "reminder_id": self.reminder_id,
            "case_id": self.case_id,
            "window_start": format_utc(self.window_start),
            "window_end": format_utc(self.window_end),
            "acknowledged": self.acknowledged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Reminder":
        return cls(
            reminder_id=str(d["reminder_id"]),
            case_id=str(d["case_id"]),
            window_start=parse_utc(d["window_start"]),
            window_end=parse_utc(d["window_end"]),
            acknowledged=bool(d.get("acknowledged", False)),
        )


def canonical_json(d: dict) -> str:
    """Stable serialization used for the round-trip identity contract."""
    return json.dumps(d, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def new_record_id() -> str:
    """128 random bits, hex-encoded."""
    return secrets.token_hex(16)


class RecordStore:
    """Append-only JSONL store with an in-memory latest-wins index."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.records_path = self.root / RECORDS_FILENAME
        self.artifacts_dir = self.root / ARTIFACTS_DIRNAME
        self._lock = threading.Lock()
        self._cases: dict[str, TstCase] = {}
        self._reminders: dict[str, Reminder] = {}
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self.artifacts_dir.mkdir(exist_ok=True)
        except OSError as exc:
            raise WriteFailureError(f"cannot create store at {self.root}: {exc}") from exc
        if self.records_path.exists():
            self._replay()

    def _replay(self) -> None:
        with open(self.records_path, "r", encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    d = json.loads(line)
                    kind = d.pop("kind")
                    if kind == "case":
                        case = TstCase.from_dict(d)
                        self._cases[case.case_id] = case
                    elif kind == "reminder":
                        rem = Reminder.from_dict(d)
                        self._reminders[rem.reminder_id] = rem
                    else:
                        raise ValueError(f"unknown record kind {kind!r}")
                except (ValueError, KeyError, TypeError) as exc:
                    raise CorruptRecordError(
                        f"{self.records_path}, line {line_no}: {exc}"
                    ) from exc

    def _append(self, kind: str, payload: dict) -> None:
        line = canonical_json({"kind": kind, **payload})
        try:
            with open(self.records_path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
        except OSError as exc:
            raise WriteFailureError(
                f"cannot write record to {self.records_path}: {exc}"
            ) from exc

    # -- cases ----------------------------------------------------------

    def create_case(self, administered_at: datetime | None = None) -> TstCase:
        case = TstCase(
            case_id=new_record_id(),
            created_at=utc_now(),
            administered_at=administered_at or utc_now(),
        )
        with self._lock:
            self._append("case", case.to_dict())
            self._cases[case.case_id] = case
        return case

    def save_case(self, case: TstCase) -> None:
        with self._lock:
            self._append("case", case.to_dict())
            self._cases[case.case_id] = case

    def load_case(self, case_id: str) -> TstCase:
        with self._lock:
            case = self._cases.get(case_id)
        if case is None:
            raise NotFoundError(f"case {case_id} not found")
        return case

    def list_cases(self) -> list[TstCase]:
        with self._lock:
            return sorted(self._cases.values(), key=lambda c: c.created_at)

    def _mutate_case(self, case_id: str, fn) -> TstCase:
        with self._lock:
            case = self._cases.get(case_id)
            if case is None:
                raise NotFoundError(f"case {case_id} not found")
            updated = fn(case)
            self._append("case", updated.to_dict())
            self._cases[case_id] = updated
            return updated

    def add_capture(self, case_id: str, capture: CaptureArtifact) -> TstCase:
        def fn(case: TstCase) -> TstCase:
            if any(c.capture_id == capture.capture_id for c in case.captures):
                raise ConflictError(f"capture {capture.capture_id} already recorded")
            return replace(case, captures=case.captures + (capture,))

        return self._mutate_case(case_id, fn)

    def decide_capture(self, case_id: str, capture_id: str, accept: bool) -> TstCase:
        """Record the accept/retake decision for an undecided capture.

        Accepting promotes the case to measured when the capture holds a
        measurement. Deciding twice, or accepting alongside an existing
        accepted capture, conflicts.
        """

        def fn(case: TstCase) -> TstCase:
            target = case.get_capture(capture_id)
            if target.accepted is not None:
                raise DecisionConflictError(
                    f"capture {capture_id} already decided "
                    f"({'accept' if target.accepted else 'retake'})"
                )
            if accept and case.accepted_capture is not None:
                raise DecisionConflictError(
                    f"case {case_id} already has an accepted capture"
                )
            captures = tuple(
                replace(c, accepted=accept) if c.capture_id == capture_id else c
                for c in case.captures
            )
            status = case.status
            if accept and target.measurement is not None and status is CaseStatus.AWAITING_READ:
                status = CaseStatus.MEASURED
            return replace(case, captures=captures, status=status)

        return self._mutate_case(case_id, fn)

    def set_questionnaire(self, case_id: str, q: Questionnaire) -> TstCase:
        return self._mutate_case(case_id, lambda case: replace(case, questionnaire=q))

    def set_assessment(self, case_id: str, assessment: Assessment) -> TstCase:
        return self._mutate_case(
            case_id,
            lambda case: replace(
                case, assessment=assessment, status=CaseStatus.ASSESSED
            ),
        )

    # -- reminders ------------------------------------------------------

    def schedule_reminder(
        self,
        case_id: str,
        read_window_hours: tuple[float, float] = DEFAULT_READ_WINDOW_HOURS,
    ) -> Reminder:
        """Schedule the follow-up read window relative to administration time.

        Raises:
            InvalidWindowError: window start is not before its end.
            NotFoundError: unknown case.
        """
        start_h, end_h = read_window_hours
        if start_h >= end_h:
            raise InvalidWindowError(
                f"read window start {start_h}h must be before end {end_h}h"
            )
        with self._lock:
            case = self._cases.get(case_id)
            if case is None:
                raise NotFoundError(f"case {case_id} not found")
            reminder = Reminder(
                reminder_id=new_record_id(),
                case_id=case_id,
                window_start=case.administered_at + timedelta(hours=start_h),
                window_end=case.administered_at + timedelta(hours=end_h),
            )
            self._append("reminder", reminder.to_dict())
            self._reminders[reminder.reminder_id] = reminder
        return reminder

    def due_reminders(self, now: datetime) -> list[Reminder]:
        """Unacknowledged reminders whose window contains ``now``, ordered by
        window start."""
        if now.tzinfo is None:
            raise ValueError("now must be timezone-aware")
        with self._lock:
            due = [
                r
                for r in self._reminders.values()
                if not r.acknowledged and r.window_start <= now <= r.window_end
            ]
        return sorted(due, key=lambda r: (r.window_start, r.reminder_id))

    def get_reminder(self, reminder_id: str) -> Reminder:
        with self._lock:
            rem = self._reminders.get(reminder_id)
        if rem is None:
            raise NotFoundError(f"reminder {reminder_id} not found")
        return rem

    def acknowledge_reminder(self, reminder_id: str) -> Reminder:
        with self._lock:
            rem = self._reminders.get(reminder_id)
            if rem is None:
                raise NotFoundError(f"reminder {reminder_id} not found")
            updated = replace(rem, acknowledged=True)
            self._append("reminder", updated.to_dict())
            self._reminders[reminder_id] = updated
        return updated

    # -- artifacts ------------------------------------------------------

    def put_artifact(self, data: bytes, suffix: str) -> str:
        """Write bytes under the content-addressed layout; returns the
        store-relative path. Identical bytes share one file."""
        digest = hashlib.sha256(data).hexdigest()
        rel = Path(ARTIFACTS_DIRNAME) / digest[:2] / f"{digest}{suffix}"
        target = self.root / rel
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            if not target.exists():
                target.write_bytes(data)
        except OSError as exc:
            raise WriteFailureError(f"cannot write artifact {rel}: {exc}") from exc
        return str(rel)

    def artifact_path(self, rel: str) -> Path:
        path = (self.root / rel).resolve()
        if not path.is_relative_to(self.root.resolve()):
            raise NotFoundError(f"artifact path {rel} escapes the store")
        if not path.exists():
            raise NotFoundError(f"artifact {rel} not found")
        return path
