from __future__ import annotations

import json
import math

import numpy as np
import pytest

from laps.metrics import (
    AccuracyReport,
    LatencyReport,
    MetricsReport,
    Trace,
    TraceFrame,
    accuracy,
    latency,
    reliability,
)


def on_frame(f, true=(500.0, 400.0), mapped=(500.0, 400.0), detected=True):
    return TraceFrame(frame=f, laser_on=True, true_screen=true, detected=detected, mapped=mapped)


def off_frame(f):
    return TraceFrame(frame=f, laser_on=False)


def hand_counted_trace() -> tuple[Trace, float, list[int], int]:
    """100-frame trace with reliability and latency worked out by hand.

    Frame plan (indices 0..99):
      0-19    off (warm-up)
      20-39   on-run A: misses on 20-21 (not detected), arrival at 22
      40-49   off
      50-69   on-run B: detected from the start, arrival immediately at 50
      70-74   off
      75-99   on-run C: detected but mapped stays out of vicinity until 83;
              misses on 90 and 95
    Hand count: laser-on frames = 20 + 20 + 25 = 65
                detected on-frames = 18 + 20 + 23 = 61
                reliability = 61/65
                latencies = [2, 0, 8], timeouts = 0
    """
    frames: list[TraceFrame] = []
    true = (500.0, 400.0)
    far = (900.0, 100.0)
    for f in range(20):
        frames.append(off_frame(f))
    for f in range(20, 40):
        if f in (20, 21):
            frames.append(TraceFrame(frame=f, laser_on=True, true_screen=true, detected=False))
        else:
            frames.append(on_frame(f, true=true, mapped=true))
    for f in range(40, 50):
        frames.append(off_frame(f))
    for f in range(50, 70):
        frames.append(on_frame(f, true=true, mapped=true))
    for f in range(70, 75):
        frames.append(off_frame(f))
    for f in range(75, 100):
        if f in (90, 95):
            frames.append(TraceFrame(frame=f, laser_on=True, true_screen=true, detected=False))
        elif f < 83:
            frames.append(on_frame(f, true=true, mapped=far))
        else:
            frames.append(on_frame(f, true=true, mapped=true))
    trace = Trace(tuple(frames))
    return trace, 61 / 65, [2, 0, 8], 0


class TestReliability:
    def test_all_detected(self):
        trace = Trace(tuple(on_frame(f) for f in range(10)))
        assert reliability(trace) == 1.0

    def test_nine_of_ten(self):
        frames = [on_frame(f) for f in range(9)]
        frames.append(TraceFrame(frame=9, laser_on=True, true_screen=(1.0, 1.0), detected=False))
        assert reliability(Trace(tuple(frames))) == 0.9

    def test_off_frames_ignored(self):
        frames = [on_frame(0), off_frame(1), off_frame(2), on_frame(3)]
        assert reliability(Trace(tuple(frames))) == 1.0

    def test_no_laser_frames_error(self):
        with pytest.raises(ValueError):
            reliability(Trace((off_frame(0), off_frame(1))))

    def test_hand_counted_hundred_frames(self):
        trace, want, _, _ = hand_counted_trace()
        assert reliability(trace) == pytest.approx(want, abs=0)

    def test_concatenation_invariant(self):
        trace, want, _, _ = hand_counted_trace()
        doubled = Trace(trace.frames + tuple(
            TraceFrame(
                frame=f.frame + 100,
                laser_on=f.laser_on,
                true_screen=f.true_screen,
                detected=f.detected,
                mapped=f.mapped,
            )
            for f in trace.frames
        ))
        assert reliability(doubled) == pytest.approx(reliability(trace), abs=1e-15)


class TestAccuracy:
    def test_exact_mapping_zero_error(self):
        trace = Trace(tuple(on_frame(f) for f in range(5)))
        report = accuracy(trace)
        assert report.mean == 0.0 and report.max == 0.0

    def test_known_offsets(self):
        # two frames in one region with errors 3.0 and 4.0; one frame far
        # away with error 5.0
        frames = (
            on_frame(0, true=(100.0, 100.0), mapped=(103.0, 100.0)),
            on_frame(1, true=(100.0, 100.0), mapped=(100.0, 104.0)),
            on_frame(2, true=(900.0, 700.0), mapped=(903.0, 704.0)),
        )
        report = accuracy(Trace(frames))
        assert report.mean == pytest.approx((3 + 4 + 5) / 3)
        assert report.max == 5.0
        top_left = report.regions[0][0]
        assert top_left.count == 2
        assert top_left.mean == pytest.approx(3.5)
        assert top_left.max == 4.0
        bottom_right = report.regions[2][2]
        assert bottom_right.count == 1 and bottom_right.max == 5.0
        assert report.regions[1][1] is None

    def test_regions_keyed_by_true_position(self):
        # the mapped point lands in another region; stats follow the truth
        frames = (on_frame(0, true=(100.0, 100.0), mapped=(600.0, 400.0)),)
        report = accuracy(Trace(frames))
        assert report.regions[0][0] is not None
        assert report.regions[1][1] is None

    def test_worst_region_max(self):
        trace, *_ = (hand_counted_trace())
        report = accuracy(trace)
        assert report.worst_region_max == report.max

    def test_zero_length_error(self):
        with pytest.raises(ValueError):
            accuracy(Trace(()))
        with pytest.raises(ValueError):
            accuracy(Trace((off_frame(0),)))

    def test_undetected_frames_excluded(self):
        frames = (
            on_frame(0, true=(100.0, 100.0), mapped=(101.0, 100.0)),
            TraceFrame(frame=1, laser_on=True, true_screen=(100.0, 100.0), detected=False),
        )
        report = accuracy(Trace(frames))
        assert report.regions[0][0].count == 1

    def test_relabeling_invariance(self):
        trace, *_ = hand_counted_trace()
        relabeled = Trace(tuple(
            TraceFrame(
                frame=f.frame * 7 + 3,
                laser_on=f.laser_on,
                true_screen=f.true_screen,
                detected=f.detected,
                mapped=f.mapped,
            )
            for f in trace.frames
        ))
        a, b = accuracy(trace), accuracy(relabeled)
        assert a.mean == b.mean and a.max == b.max

    def test_ideal_synthetic_below_one_pixel(self):
        from laps.scripts import load_bundled
        from laps.simcam import run_scenario

        result = run_scenario(load_bundled("accuracy_ideal"))
        report = accuracy(result.trace)
        assert report.max < 1.0


class TestLatency:
    def test_same_frame_arrival_zero(self):
        trace = Trace((on_frame(0),))
        report = latency(trace)
        assert report.samples == (0,)
        assert report.to_ms(report.mean_frames) == 0.0

    def test_next_frame_arrival_33ms(self):
        frames = (
            on_frame(0, mapped=(900.0, 100.0)),
            on_frame(1, mapped=(500.0, 400.0)),
        )
        report = latency(Trace(frames))
        assert report.samples == (1,)
        assert report.to_ms(report.mean_frames) == pytest.approx(1000.0 / 30.0)

    def test_hand_counted_multi_activation(self):
        trace, _, want_samples, want_timeouts = hand_counted_trace()
        report = latency(trace)
        assert list(report.samples) == want_samples
        assert report.timeouts == want_timeouts
        assert report.min_frames == 0
        assert report.max_frames == 8
        assert report.mean_frames == pytest.approx(10 / 3)

    def test_timeout_counted(self):
        frames = (
            on_frame(0, mapped=(900.0, 100.0)),
            on_frame(1, mapped=(900.0, 100.0)),
            off_frame(2),
            on_frame(3),
        )
        report = latency(Trace(frames))
        assert report.timeouts == 1
        assert report.samples == (0,)

    def test_no_activations_error(self):
        with pytest.raises(ValueError):
            latency(Trace((off_frame(0),)))

    def test_min_mean_max_ordering(self):
        trace, *_ = hand_counted_trace()
        report = latency(trace)
        assert report.min_frames <= report.mean_frames <= report.max_frames

    def test_vicinity_uses_frame_indices_not_positions(self):
        # sparse frame indices: latency counts index deltas, not list slots
        frames = (
            TraceFrame(frame=10, laser_on=True, true_screen=(500.0, 400.0),
                       detected=True, mapped=(900.0, 100.0)),
            TraceFrame(frame=14, laser_on=True, true_screen=(500.0, 400.0),
                       detected=True, mapped=(500.0, 400.0)),
        )
        report = latency(Trace(frames))
        assert report.samples == (4,)


class TestMetricsReport:
    def test_compute_and_json(self):
        trace, want_rel, want_lat, _ = hand_counted_trace()
        report = MetricsReport.compute(trace)
        assert report.reliability == pytest.approx(want_rel)
        doc = report.to_json_obj()
        assert doc["reliability"] == pytest.approx(want_rel)
        assert doc["latency"]["samples"] == want_lat
        assert doc["latency"]["timeouts"] == 0
        assert doc["latency"]["mean_ms"] == pytest.approx((10 / 3) * 1000 / 30)
        assert "accuracy" in doc
        json.dumps(doc)  # must be serializable as-is

    def test_strict_false_tolerates_empty(self):
        trace = Trace((off_frame(0),))
        report = MetricsReport.compute(trace, strict=False)
        assert report.reliability is None
        assert report.accuracy is None
        assert report.latency is None

    def test_strict_true_propagates(self):
        with pytest.raises(ValueError):
            MetricsReport.compute(Trace((off_frame(0),)))

    def test_table_lists_three_criteria(self):
        trace, *_ = hand_counted_trace()
        table = MetricsReport.compute(trace).table()
        for label in ("Reliability", "Accuracy", "Latency"):
            assert label in table

    def test_fps_controls_ms_conversion(self):
        frames = (
            on_frame(0, mapped=(900.0, 100.0)),
            on_frame(1),
        )
        report = latency(Trace(frames, fps=60.0))
        assert report.to_ms(report.mean_frames) == pytest.approx(1000.0 / 60.0)
