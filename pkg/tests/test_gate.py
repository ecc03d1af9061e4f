from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import capture_expected
from tstkit.errors import GateTerminalError, StreamParseError
from tstkit.gate import (
    CaptureDecision,
    DEFAULT_GATE_CONFIG,
    GateConfig,
    GateState,
    SensorSample,
    evaluate_sample,
    parse_stream,
    run_stream,
    step,
)
from tstkit.raster import Point

CFG = GateConfig(
    guide_center=Point(225, 225),
    guide_inner_radius_px=60,
    guide_outer_radius_px=160,
    required_consecutive=5,
)


def ok_sample(ts=0, depth=300, pitch=0.0, roll=0.0, center=Point(225, 225), radius=100.0):
    return SensorSample(ts, depth, pitch, roll, center, radius)


class TestEvaluateSample:
    def test_all_ok_witness(self):
        status = evaluate_sample(CFG, ok_sample())
        assert status.to_dict() == {
            "depth_ok": True,
            "orientation_ok": True,
            "alignment_ok": True,
            "all_ok": True,
        }

    def test_depth_below_lower_bound(self):
        assert not evaluate_sample(CFG, ok_sample(depth=170)).depth_ok

    def test_depth_bounds_inclusive(self):
        assert evaluate_sample(CFG, ok_sample(depth=175)).depth_ok
        assert evaluate_sample(CFG, ok_sample(depth=400)).depth_ok
        assert not evaluate_sample(CFG, ok_sample(depth=174)).depth_ok
        assert not evaluate_sample(CFG, ok_sample(depth=401)).depth_ok

    def test_small_pitch_within_tolerance(self):
        assert evaluate_sample(CFG, ok_sample(pitch=0.1)).orientation_ok

    def test_orientation_failures(self):
        assert not evaluate_sample(CFG, ok_sample(pitch=2.5)).orientation_ok
        assert not evaluate_sample(CFG, ok_sample(roll=-3.0)).orientation_ok

    def test_missing_candidate_fails_alignment(self):
        s = SensorSample(0, 300, 0.0, 0.0)
        status = evaluate_sample(CFG, s)
        assert not status.alignment_ok and not status.all_ok

    def test_candidate_off_center(self):
        s = ok_sample(center=Point(225 + 61, 225))
        assert not evaluate_sample(CFG, s).alignment_ok

    def test_candidate_too_large(self):
        s = ok_sample(radius=161.0)
        assert not evaluate_sample(CFG, s).alignment_ok

    def test_all_ok_truth_table(self):
        # all_ok must be the conjunction, exhaustively over panel outcomes
        variants = {
            "depth": (300, 500),
            "pitch": (0.0, 5.0),
            "center": (Point(225, 225), Point(400, 225)),
        }
        for d_ok, depth in enumerate(variants["depth"]):
            for o_ok, pitch in enumerate(variants["pitch"]):
                for a_ok, center in enumerate(variants["center"]):
                    status = evaluate_sample(
                        CFG, ok_sample(depth=depth, pitch=pitch, center=center)
                    )
                    assert status.depth_ok == (d_ok == 0)
                    assert status.orientation_ok == (o_ok == 0)
                    assert status.alignment_ok == (a_ok == 0)
                    assert status.all_ok == (d_ok == o_ok == a_ok == 0)


class TestStep:
    def test_capture_on_fifth_consecutive(self):
        state = GateState()
        decisions = []
        for i in range(5):
            state, d = step(state, CFG, ok_sample(ts=i))
            decisions.append(d)
        assert decisions[:4] == [CaptureDecision.NO_CAPTURE] * 4
        assert decisions[4] is CaptureDecision.CAPTURE
        assert state.captured

    def test_reset_on_failure(self):
        state = GateState()
        for i in range(4):
            state, _ = step(state, CFG, ok_sample(ts=i))
        state, d = step(state, CFG, ok_sample(ts=4, depth=450))
        assert d is CaptureDecision.NO_CAPTURE
        assert state.consecutive_passes == 0

    def test_required_consecutive_one(self):
        cfg = GateConfig(
            guide_center=Point(225, 225),
            guide_inner_radius_px=60,
            guide_outer_radius_px=160,
            required_consecutive=1,
        )
        _, d = step(GateState(), cfg, ok_sample())
        assert d is CaptureDecision.CAPTURE

    def test_terminal_state_raises(self):
        state = GateState(captured=True)
        with pytest.raises(GateTerminalError):
            step(state, CFG, ok_sample())

    def test_never_captures_twice(self):
        trace = run_stream(CFG, [ok_sample(ts=i) for i in range(20)])
        captures = [d for _, _, d in trace if d is CaptureDecision.CAPTURE]
        assert len(captures) == 1
        assert len(trace) == 5  # stream stops at the capture


def random_stream(rng: random.Random, cfg: GateConfig):
    samples = []
    for i in range(rng.randint(0, 30)):
        depth = rng.choice([0, 170, 200, 300, 400, 405])
        pitch = rng.choice([0.0, 1.5, 3.0])
        roll = rng.choice([0.0, -1.0, 2.5])
        if rng.random() < 0.8:
            center = Point(rng.choice([225, 230, 300]), 225)
            radius = rng.choice([50.0, 150.0, 170.0])
        else:
            center, radius = None, None
        samples.append(SensorSample(i, depth, pitch, roll, center, radius))
    return samples


class TestCaptureIffQualifyingRun:
    def test_seeded_streams_against_window_scan(self):
        rng = random.Random(20240811)
        for _ in range(2000):
            required = rng.randint(1, 6)
            cfg = GateConfig(
                guide_center=Point(225, 225),
                guide_inner_radius_px=60,
                guide_outer_radius_px=160,
                required_consecutive=required,
            )
            samples = random_stream(rng, cfg)
            flags = [evaluate_sample(cfg, s).all_ok for s in samples]
            expected = capture_expected(flags, required)
            trace = run_stream(cfg, samples)
            got = any(d is CaptureDecision.CAPTURE for _, _, d in trace)
            assert got == expected

    @given(st.data())
    @settings(max_examples=200)
    def test_property_capture_iff_run(self, data):
        required = data.draw(st.integers(1, 5))
        flags = data.draw(st.lists(st.booleans(), max_size=40))
        cfg = GateConfig(
            guide_center=Point(10, 10),
            guide_inner_radius_px=5,
            guide_outer_radius_px=8,
            required_consecutive=required,
        )
        # encode each boolean as a passing/failing sample
        samples = [
            SensorSample(i, 300 if ok else 0, 0.0, 0.0, Point(10, 10), 4.0)
            for i, ok in enumerate(flags)
        ]
        trace = run_stream(cfg, samples)
        got = any(d is CaptureDecision.CAPTURE for _, _, d in trace)
        assert got == capture_expected(flags, required)


class TestParseStream:
    def test_four_and_seven_field_lines(self):
        text = "0 300 0.0 0.0\n10 300 0.5 -0.5 225 225 90\n"
        samples = parse_stream(text)
        assert len(samples) == 2
        assert samples[0].candidate_center is None
        assert samples[1].candidate_center == Point(225, 225)

    def test_malformed_line_names_line_number(self):
        text = "0 300 0.0 0.0\n1 300 0.0 0.0\nbogus line here\n"
        with pytest.raises(StreamParseError) as exc:
            parse_stream(text)
        assert exc.value.line_no == 3

    def test_decreasing_timestamp_rejected(self):
        with pytest.raises(StreamParseError):
            parse_stream("5 300 0 0\n4 300 0 0\n")

    def test_comments_and_blanks_skipped(self):
        assert len(parse_stream("# header\n\n0 300 0 0\n")) == 1
