"""Reliability, accuracy, and latency computed from per-frame pipeline traces.

Reliability is the fraction of laser-on frames with a detection.  Accuracy
is the screen-pixel distance between the mapped point and the true laser
position, aggregated over a 3x3 grid of screen regions.  Latency counts
frames from each beam activation until the mapped point first enters the
dwell vicinity of the true spot, converted to milliseconds at the nominal
frame rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .control import CommandEvent

Point = tuple[float, float]

DEFAULT_SCREEN_W = 1024
DEFAULT_SCREEN_H = 768
DEFAULT_FPS = 30.0
DEFAULT_VICINITY_FRAC = 0.02
GRID = 3


@dataclass(frozen=True)
class TraceFrame:
    """Ground truth and pipeline outputs for one processed frame."""

    frame: int
    laser_on: bool
    true_screen: Point | None = None  # commanded laser position, screen px
    detected: bool = False
    camera: Point | None = None  # detected centroid, camera px
    in_roi: bool = False
    mapped: Point | None = None  # mapped screen point, None when unusable
    mode: str = "Normal"
    events: tuple[CommandEvent, ...] = ()


@dataclass(frozen=True)
class Trace:
    """A scenario run's frame-by-frame record."""

    frames: tuple[TraceFrame, ...]
    screen_w: int = DEFAULT_SCREEN_W
    screen_h: int = DEFAULT_SCREEN_H
    fps: float = DEFAULT_FPS

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise ValueError("fps must be positive")


def reliability(trace: Trace) -> float:
    """Detected laser-on frames divided by all laser-on frames."""
    on = [f for f in trace.frames if f.laser_on]
    if not on:
        raise ValueError("trace has no laser-on frames")
    return sum(1 for f in on if f.detected) / len(on)


def _region_of(point: Point, screen_w: int, screen_h: int) -> tuple[int, int]:
    col = min(GRID - 1, int(GRID * point[0] / screen_w))
    row = min(GRID - 1, int(GRID * point[1] / screen_h))
    return (row, col)


@dataclass(frozen=True)
class RegionStats:
    count: int
    mean: float
    max: float


@dataclass(frozen=True)
class AccuracyReport:
    """Mapping error statistics per screen region and overall."""

    regions: tuple[tuple[RegionStats | None, ...], ...]  # [row][col], None if unsampled
    mean: float
    max: float

    @property
    def worst_region_max(self) -> float:
        return max(s.max for row in self.regions for s in row if s is not None)


def accuracy(trace: Trace) -> AccuracyReport:
    """Mapped-vs-true screen error, aggregated over the 3x3 region grid.

    Only laser-on frames with both a ground-truth position and a mapped
    point qualify; a trace with none is an error.
    """
    buckets: list[list[list[float]]] = [[[] for _ in range(GRID)] for _ in range(GRID)]
    errors: list[float] = []
    for f in trace.frames:
        if not (f.laser_on and f.true_screen is not None and f.mapped is not None):
            continue
        err = math.dist(f.mapped, f.true_screen)
        row, col = _region_of(f.true_screen, trace.screen_w, trace.screen_h)
        buckets[row][col].append(err)
        errors.append(err)
    if not errors:
        raise ValueError("trace has no frames with ground truth and a mapped point")
    regions = tuple(
        tuple(
            RegionStats(count=len(cell), mean=sum(cell) / len(cell), max=max(cell)) if cell else None
            for cell in row
        )
        for row in buckets
    )
    return AccuracyReport(regions=regions, mean=sum(errors) / len(errors), max=max(errors))


@dataclass(frozen=True)
class LatencyReport:
    """Frames (and ms) from beam activation to cursor arrival per activation."""

    samples: tuple[int, ...]  # latency in frames, one per completed activation
    timeouts: int  # activations with no arrival before the trace ended
    fps: float

    @property
    def min_frames(self) -> int:
        return min(self.samples)

    @property
    def max_frames(self) -> int:
        return max(self.samples)

    @property
    def mean_frames(self) -> float:
        return sum(self.samples) / len(self.samples)

    def to_ms(self, frames: float) -> float:
        return frames * 1000.0 / self.fps


def latency(trace: Trace, vicinity_frac: float = DEFAULT_VICINITY_FRAC) -> LatencyReport:
    """Per-activation frame counts until the mapped point reaches the true spot.

    An activation is a laser-on frame whose predecessor in the trace is off
    (or that starts the trace).  Arrival is the first frame of the same
    on-run whose mapped point lies within the vicinity box (per-axis
    fraction of the screen) of that frame's true position.  Runs that end
    without arrival count as timeouts.
    """
    frames = trace.frames
    tol_x = vicinity_frac * trace.screen_w
    tol_y = vicinity_frac * trace.screen_h
    samples: list[int] = []
    timeouts = 0
    i = 0
    while i < len(frames):
        if not frames[i].laser_on:
            i += 1
            continue
        start = i
        arrival: int | None = None
        while i < len(frames) and frames[i].laser_on:
            f = frames[i]
            if arrival is None and f.mapped is not None and f.true_screen is not None:
                if abs(f.mapped[0] - f.true_screen[0]) <= tol_x and abs(f.mapped[1] - f.true_screen[1]) <= tol_y:
                    arrival = i
            i += 1
        if arrival is None:
            timeouts += 1
        else:
            samples.append(frames[arrival].frame - frames[start].frame)
    if not samples and not timeouts:
        raise ValueError("trace has no laser activations")
    return LatencyReport(samples=tuple(samples), timeouts=timeouts, fps=trace.fps)


@dataclass(frozen=True)
class MetricsReport:
    """The three performance criteria for one trace."""

    reliability: float | None
    accuracy: AccuracyReport | None
    latency: LatencyReport | None

    @classmethod
    def compute(cls, trace: Trace, vicinity_frac: float = DEFAULT_VICINITY_FRAC, strict: bool = True) -> "MetricsReport":
        """Evaluate all three criteria; with strict=False, unsatisfiable ones become None."""
        values: list = []
        for fn in (reliability, accuracy, lambda t: latency(t, vicinity_frac)):
            try:
                values.append(fn(trace))
            except ValueError:
                if strict:
                    raise
                values.append(None)
        return cls(reliability=values[0], accuracy=values[1], latency=values[2])

    def to_json_obj(self) -> dict:
        acc = None
        if self.accuracy is not None:
            acc = {
                "mean": self.accuracy.mean,
                "max": self.accuracy.max,
                "regions": [
                    [
                        None if s is None else {"count": s.count, "mean": s.mean, "max": s.max}
                        for s in row
                    ]
                    for row in self.accuracy.regions
                ],
            }
        lat = None
        if self.latency is not None:
            lat = {
                "timeouts": self.latency.timeouts,
                "samples": list(self.latency.samples),
            }
            if self.latency.samples:
                lat.update(
                    {
                        "min_frames": self.latency.min_frames,
                        "max_frames": self.latency.max_frames,
                        "mean_frames": self.latency.mean_frames,
                        "min_ms": self.latency.to_ms(self.latency.min_frames),
                        "max_ms": self.latency.to_ms(self.latency.max_frames),
                        "mean_ms": self.latency.to_ms(self.latency.mean_frames),
                    }
                )
        return {"reliability": self.reliability, "accuracy": acc, "latency": lat}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    def table(self) -> str:
        """Aligned text table over the three criteria."""
        rows: list[tuple[str, str]] = []
        if self.reliability is None:
            rows.append(("Reliability", "n/a"))
        else:
            rows.append(("Reliability", f"{100.0 * self.reliability:.1f} %"))
        if self.accuracy is None:
            rows.append(("Accuracy", "n/a"))
        else:
            rows.append(
                ("Accuracy", f"mean {self.accuracy.mean:.2f} px, worst {self.accuracy.max:.2f} px")
            )
        if self.latency is None or not self.latency.samples:
            suffix = "" if self.latency is None else f" ({self.latency.timeouts} timeouts)"
            rows.append(("Latency", "n/a" + suffix))
        else:
            lat = self.latency
            rows.append(
                (
                    "Latency",
                    "min/max/mean "
                    f"{lat.to_ms(lat.min_frames):.1f}/{lat.to_ms(lat.max_frames):.1f}/{lat.to_ms(lat.mean_frames):.1f} ms "
                    f"({lat.min_frames}/{lat.max_frames}/{lat.mean_frames:.2f} frames, {lat.timeouts} timeouts)",
                )
            )
        width = max(len(name) for name, _ in rows)
        lines = [f"{name:<{width}}  {value}" for name, value in rows]
        return "\n".join(lines)
