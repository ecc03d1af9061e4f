from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tstkit.errors import (
    ConflictError,
    CorruptRecordError,
    DecisionConflictError,
    InvalidWindowError,
    NotFoundError,
    WriteFailureError,
)
from tstkit.interpret import TstResult, classify
from tstkit.measure import ChordMeasurement
from tstkit.raster import Point
from tstkit.store import (
    CaptureArtifact,
    CaseStatus,
    RecordStore,
    TstCase,
    canonical_json,
    format_utc,
    parse_utc,
)
from test_interpret import q_with

T0 = datetime(2026, 8, 1, 9, 30, tzinfo=timezone.utc)


def sample_measurement() -> ChordMeasurement:
    return ChordMeasurement(Point(10, 12), Point(70, 40), 65.07, 9.910161, 0.1523)


def sample_capture(cid="c1", **kw) -> CaptureArtifact:
    defaults = dict(
        capture_id=cid,
        image_path="artifacts/ab/abc.png",
        depth_path="artifacts/ab/abc.dpth",
        mask_path=None,
        measurement=sample_measurement(),
        accepted=None,
    )
    defaults.update(kw)
    return CaptureArtifact(**defaults)


class TestCreateCase:
    def test_constructor_fields(self, store):
        case = store.create_case(T0)
        assert case.administered_at == T0
        assert case.status is CaseStatus.AWAITING_READ
        assert case.captures == ()

    def test_distinct_ids(self, store):
        assert store.create_case(T0).case_id != store.create_case(T0).case_id

    def test_unwritable_storage(self, tmp_path):
        store = RecordStore(tmp_path / "ro")
        # occupy the record file's path with a directory: appends must fail
        store.records_path.mkdir()
        with pytest.raises(WriteFailureError):
            store.create_case(T0)


class TestSaveLoad:
    def test_round_trip_fully_populated(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture())
        store.decide_capture(case.case_id, "c1", accept=True)
        store.set_questionnaire(case.case_id, q_with(hiv_positive=True))
        store.set_assessment(
            case.case_id, classify(9.910161, q_with(hiv_positive=True))
        )
        loaded = store.load_case(case.case_id)
        assert loaded.status is CaseStatus.ASSESSED
        assert loaded.assessment.result is TstResult.POSITIVE
        # byte-for-byte stable re-serialization
        assert canonical_json(loaded.to_dict()) == canonical_json(
            TstCase.from_dict(loaded.to_dict()).to_dict()
        )

    def test_reload_from_disk(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture())
        reopened = RecordStore(store.root)
        assert canonical_json(reopened.load_case(case.case_id).to_dict()) == \
            canonical_json(store.load_case(case.case_id).to_dict())

    def test_unknown_id(self, store):
        with pytest.raises(NotFoundError):
            store.load_case("feedbeef")

    def test_truncated_record_line(self, store):
        store.create_case(T0)
        with open(store.records_path, "a", encoding="utf-8") as f:
            f.write('{"kind": "case", "case_id": "xx"\n')
        with pytest.raises(CorruptRecordError):
            RecordStore(store.root)

    def test_unknown_fields_preserved(self, store):
        case = store.create_case(T0)
        d = case.to_dict()
        d["vendor_note"] = {"source": "importer"}
        restored = TstCase.from_dict(d)
        assert restored.extra == {"vendor_note": {"source": "importer"}}
        assert restored.to_dict()["vendor_note"] == {"source": "importer"}

    @given(
        st.integers(0, 3),
        st.booleans(),
        st.booleans(),
        st.integers(0, 2**11 - 1),
    )
    @settings(max_examples=60)
    def test_serialization_round_trip_random_cases(
        self, n_captures, decided, with_q, qbits
    ):
        from tstkit.interpret import QUESTIONNAIRE_FIELDS, Questionnaire

        captures = []
        for i in range(n_captures):
            accepted = None
            if decided and i == 0:
                accepted = True
            elif decided:
                accepted = False
            captures.append(sample_capture(cid=f"c{i}", accepted=accepted))
        q = (
            Questionnaire(
                **{f: bool(qbits >> i & 1) for i, f in enumerate(QUESTIONNAIRE_FIELDS)}
            )
            if with_q
            else None
        )
        case = TstCase(
            case_id="a" * 32,
            created_at=T0,
            administered_at=T0 + timedelta(minutes=5),
            questionnaire=q,
            captures=tuple(captures),
            status=CaseStatus.AWAITING_READ,
        )
        restored = TstCase.from_dict(case.to_dict())
        assert canonical_json(restored.to_dict()) == canonical_json(case.to_dict())
        assert restored == case


class TestCaptureDecisions:
    def test_accept_promotes_to_measured(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture())
        updated = store.decide_capture(case.case_id, "c1", accept=True)
        assert updated.status is CaseStatus.MEASURED
        assert updated.accepted_capture.capture_id == "c1"

    def test_double_decision_conflicts(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture())
        store.decide_capture(case.case_id, "c1", accept=False)
        with pytest.raises(DecisionConflictError):
            store.decide_capture(case.case_id, "c1", accept=True)

    def test_second_accept_conflicts(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture("c1"))
        store.add_capture(case.case_id, sample_capture("c2"))
        store.decide_capture(case.case_id, "c1", accept=True)
        with pytest.raises(DecisionConflictError):
            store.decide_capture(case.case_id, "c2", accept=True)

    def test_retake_then_accept_new(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture("c1"))
        store.decide_capture(case.case_id, "c1", accept=False)
        store.add_capture(case.case_id, sample_capture("c2"))
        updated = store.decide_capture(case.case_id, "c2", accept=True)
        assert updated.accepted_capture.capture_id == "c2"

    def test_duplicate_capture_id_rejected(self, store):
        case = store.create_case(T0)
        store.add_capture(case.case_id, sample_capture())
        with pytest.raises(ConflictError):
            store.add_capture(case.case_id, sample_capture())

    def test_at_most_one_accepted_invariant(self):
        with pytest.raises(ValueError):
            TstCase(
                case_id="x",
                created_at=T0,
                administered_at=T0,
                captures=(
                    sample_capture("c1", accepted=True),
                    sample_capture("c2", accepted=True),
                ),
            )


class TestReminders:
    def test_window_arithmetic(self, store):
        case = store.create_case(T0)
        rem = store.schedule_reminder(case.case_id, (48, 72))
        assert rem.window_start == T0 + timedelta(hours=48)
        assert rem.window_end == T0 + timedelta(hours=72)

    def test_invalid_window(self, store):
        case = store.create_case(T0)
        with pytest.raises(InvalidWindowError):
            store.schedule_reminder(case.case_id, (72, 48))

    def test_degenerate_small_window(self, store):
        case = store.create_case(T0)
        rem = store.schedule_reminder(case.case_id, (0, 1))
        assert rem.window_start == T0
        assert rem.window_end == T0 + timedelta(hours=1)

    def test_due_before_any_window(self, store):
        case = store.create_case(T0)
        store.schedule_reminder(case.case_id)
        assert store.due_reminders(T0) == []

    def test_due_inside_window(self, store):
        case = store.create_case(T0)
        rem = store.schedule_reminder(case.case_id, (48, 72))
        due = store.due_reminders(T0 + timedelta(hours=60))
        assert [r.reminder_id for r in due] == [rem.reminder_id]

    def test_acknowledged_excluded(self, store):
        case = store.create_case(T0)
        rem = store.schedule_reminder(case.case_id, (48, 72))
        store.acknowledge_reminder(rem.reminder_id)
        assert store.due_reminders(T0 + timedelta(hours=60)) == []

    def test_window_boundaries_inclusive(self, store):
        case = store.create_case(T0)
        store.schedule_reminder(case.case_id, (48, 72))
        assert len(store.due_reminders(T0 + timedelta(hours=48))) == 1
        assert len(store.due_reminders(T0 + timedelta(hours=72))) == 1
        assert store.due_reminders(T0 + timedelta(hours=72, seconds=1)) == []

    def test_ordered_by_window_start(self, store):
        c1 = store.create_case(T0)
        c2 = store.create_case(T0 - timedelta(hours=10))
        store.schedule_reminder(c1.case_id, (48, 120))
        store.schedule_reminder(c2.case_id, (48, 120))
        due = store.due_reminders(T0 + timedelta(hours=80))
        starts = [r.window_start for r in due]
        assert starts == sorted(starts)


class TestArtifacts:
    def test_content_addressed_layout(self, store):
        rel = store.put_artifact(b"hello-artifact", ".png")
        assert rel.startswith("artifacts/")
        path = store.artifact_path(rel)
        assert path.read_bytes() == b"hello-artifact"
        # identical bytes land on the same path
        assert store.put_artifact(b"hello-artifact", ".png") == rel

    def test_escape_rejected(self, store):
        with pytest.raises(NotFoundError):
            store.artifact_path("../outside.png")

    def test_utc_text_round_trip(self):
        t = datetime(2026, 1, 2, 3, 4, 5, 123456, tzinfo=timezone.utc)
        assert parse_utc(format_utc(t)) == t
        with pytest.raises(ValueError):
            format_utc(datetime(2026, 1, 1))
