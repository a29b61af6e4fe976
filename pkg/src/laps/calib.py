"""Four-corner calibration and the camera-to-screen projective map.

The presenter holds the laser on each screen corner in turn; the mean
camera position per corner defines a quadrilateral (the region of
interest) and a 3x3 projective transform that maps camera coordinates to
screen coordinates via the homogeneous division (X'/W', Y'/W').
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

Point = tuple[float, float]
CameraPoint = Point
ScreenPoint = Point

DEFAULT_SCREEN_W = 1024
DEFAULT_SCREEN_H = 768
DEFAULT_SAMPLES_PER_CORNER = 10
COLLINEARITY_TOL = 1e-6
W_EPSILON = 1e-12
ROI_EDGE_TOL = 1e-6

# Prescribed corner sequence; the quad and the screen targets share it.
CORNER_ORDER = ("top-left", "top-right", "bottom-right", "bottom-left")


class CalibrationError(Exception):
    """Base error for calibration and mapping failures."""


class DegenerateQuadError(CalibrationError):
    """Corner points are collinear, non-convex, or otherwise unusable."""


class PointAtInfinityError(CalibrationError):
    """The projective map sends the point to (near-)infinity."""


def screen_corners(width: int, height: int) -> list[ScreenPoint]:
    """Screen-corner targets in CORNER_ORDER (inclusive pixel corners)."""
    return [
        (0.0, 0.0),
        (float(width - 1), 0.0),
        (float(width - 1), float(height - 1)),
        (0.0, float(height - 1)),
    ]


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def validate_quad(quad: Sequence[Point], what: str = "quad") -> None:
    """Require a convex quadrilateral with no three near-collinear corners.

    Each consecutive corner triple covers one of the four corner triples,
    so the collinearity check (twice the triangle area <= tolerance) covers
    them all.
    """
    if len(quad) != 4:
        raise DegenerateQuadError(f"{what} needs exactly 4 points, got {len(quad)}")
    crosses = [_cross(quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]) for i in range(4)]
    if any(abs(c) <= 2 * COLLINEARITY_TOL for c in crosses):
        raise DegenerateQuadError(f"{what} has (near-)collinear corners")
    if not (all(c > 0 for c in crosses) or all(c < 0 for c in crosses)):
        raise DegenerateQuadError(f"{what} is not convex")


@dataclass(frozen=True, eq=False)
class Homography:
    """3x3 projective map, normalized so the last entry is 1 when nonzero."""

    p: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.p, dtype=float).reshape(3, 3)
        if not np.all(np.isfinite(m)):
            raise ValueError("homography entries must be finite")
        if m[2, 2] != 0.0:
            m = m / m[2, 2]
        if abs(np.linalg.det(m)) <= 1e-12:
            raise DegenerateQuadError("homography is not invertible")
        m.setflags(write=False)
        object.__setattr__(self, "p", m)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.p))

    def flat(self) -> list[float]:
        return [float(v) for v in self.p.ravel()]


def map_point(h: Homography, point: Point) -> Point:
    """Apply the projective map: (X', Y', W') = P @ (x, y, 1), return (X'/W', Y'/W')."""
    x, y = point
    v = h.p @ (float(x), float(y), 1.0)
    w = v[2]
    if abs(w) < W_EPSILON:
        raise PointAtInfinityError(f"point {point!r} maps to infinity")
    return (float(v[0] / w), float(v[1] / w))


def solve_homography(src: Sequence[Point], dst: Sequence[Point]) -> Homography:
    """Solve the 8-unknown linear system mapping four src points onto four dst points.

    P9 is fixed to 1 and the 8x8 system is solved by LU factorization with
    partial pivoting (plain Gaussian elimination; no normalization is
    needed at calibration scale).
    """
    src = [(float(x), float(y)) for x, y in src]
    dst = [(float(x), float(y)) for x, y in dst]
    validate_quad(src, "source quad")
    validate_quad(dst, "destination quad")
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i, ((x, y), (gx, gy)) in enumerate(zip(src, dst)):
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -gx * x, -gx * y]
        b[2 * i] = gx
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -gy * x, -gy * y]
        b[2 * i + 1] = gy
    try:
        sol = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateQuadError("singular correspondence system") from exc
    return Homography(np.append(sol, 1.0))


def in_roi(quad: Sequence[Point], point: Point, tol: float = ROI_EDGE_TOL) -> bool:
    """Boundary-inclusive point-in-convex-quad test (same side of all edges).

    Inclusive so the calibration corners themselves count as in-ROI.
    """
    crosses = [_cross(quad[i], quad[(i + 1) % 4], point) for i in range(4)]
    return all(c >= -tol for c in crosses) or all(c <= tol for c in crosses)


@dataclass(frozen=True)
class Calibration:
    """Completed calibration: the map, its camera-space ROI, and the screen size."""

    homography: Homography
    quad: tuple[CameraPoint, CameraPoint, CameraPoint, CameraPoint]
    screen_w: int = DEFAULT_SCREEN_W
    screen_h: int = DEFAULT_SCREEN_H

    def map(self, point: CameraPoint) -> ScreenPoint:
        return map_point(self.homography, point)

    def contains(self, point: CameraPoint) -> bool:
        return in_roi(self.quad, point)

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.homography.flat(),
                "quad": [[float(x), float(y)] for x, y in self.quad],
                "screen": [self.screen_w, self.screen_h],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Calibration":
        obj = json.loads(text)
        quad = tuple((float(x), float(y)) for x, y in obj["quad"])
        return cls(
            homography=Homography(np.asarray(obj["p"], dtype=float)),
            quad=quad,
            screen_w=int(obj["screen"][0]),
            screen_h=int(obj["screen"][1]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "Calibration":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class CalibrationProgress:
    """Outcome of feeding one detection to a calibration session."""

    corner: int  # corner currently being collected (4 when done)
    samples: int  # samples held for that corner
    done: bool = False
    failed: bool = False
    reason: str | None = None


class CalibrationSession:
    """Collects per-corner spot samples and solves the calibration.

    Single-owner mutable state.  Corners are collected in CORNER_ORDER;
    each corner is the arithmetic mean of ``samples_per_corner`` detected
    centroids.  A missing detection never aborts: the session simply waits
    for the next one.  A degenerate corner quad fails the session and
    resets it.
    """

    def __init__(
        self,
        screen_w: int = DEFAULT_SCREEN_W,
        screen_h: int = DEFAULT_SCREEN_H,
        samples_per_corner: int = DEFAULT_SAMPLES_PER_CORNER,
        targets: Sequence[ScreenPoint] | None = None,
    ):
        if samples_per_corner < 1:
            raise ValueError("samples_per_corner must be >= 1")
        self.screen_w = screen_w
        self.screen_h = screen_h
        self.samples_per_corner = samples_per_corner
        self.targets = [tuple(map(float, t)) for t in (targets or screen_corners(screen_w, screen_h))]
        if len(self.targets) != 4:
            raise ValueError("exactly four corner targets required")
        self.reset()

    def reset(self) -> None:
        self.samples: list[list[CameraPoint]] = [[] for _ in range(4)]
        self.corners: list[CameraPoint] = []
        self.result: Calibration | None = None

    @property
    def current_corner(self) -> int:
        return len(self.corners)

    @property
    def done(self) -> bool:
        return self.result is not None

    def _progress(self) -> CalibrationProgress:
        c = self.current_corner
        n = len(self.samples[c]) if c < 4 else self.samples_per_corner
        return CalibrationProgress(corner=c, samples=n, done=self.done)

    def feed(self, detection) -> CalibrationProgress:
        """Add one observation; detection may be a SpotDetection, an (x, y) pair, or None."""
        if self.done:
            raise CalibrationError("calibration session already complete")
        if detection is None:
            return self._progress()
        point = detection.centroid if hasattr(detection, "centroid") else (float(detection[0]), float(detection[1]))
        bucket = self.samples[self.current_corner]
        bucket.append(point)
        if len(bucket) == self.samples_per_corner:
            xs = [p[0] for p in bucket]
            ys = [p[1] for p in bucket]
            self.corners.append((sum(xs) / len(xs), sum(ys) / len(ys)))
        if len(self.corners) == 4:
            try:
                quad = tuple(self.corners)
                validate_quad(quad, "calibration quad")
                h = solve_homography(quad, self.targets)
            except DegenerateQuadError as exc:
                self.reset()
                return CalibrationProgress(corner=0, samples=0, failed=True, reason=str(exc))
            self.result = Calibration(h, quad, self.screen_w, self.screen_h)
        return self._progress()


def feed_calibration(session: CalibrationSession, detection) -> tuple[CalibrationSession, CalibrationProgress]:
    """Feed one detection (or None) to the session; returns it with the progress event."""
    return session, session.feed(detection)
