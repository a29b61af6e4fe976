"""Synthetic camera standing in for the physical screen-plus-camera rig.

Renders a screen image as seen by a fixed camera: a projective warp,
per-channel ambient attenuation (the red-filter model, which crushes blue
and green background light), an additive blue-dominant Gaussian laser
spot, optional single-parameter radial distortion, and per-frame Gaussian
noise.  Also defines scripted scenarios that drive the full
detect -> ROI -> map -> gesture pipeline and produce metric traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calib import (
    Calibration,
    CalibrationSession,
    Homography,
    map_point,
    screen_corners,
    solve_homography,
)
from .control import COMMAND_KINDS, CommandEvent, Controller, ControllerConfig
from .imaging import DEFAULT_FPS, Frame
from .metrics import Trace, TraceFrame
from .spot import DetectorConfig, detect

Point = tuple[float, float]

DEFAULT_SCREEN_W = 1024
DEFAULT_SCREEN_H = 768
DEFAULT_CAM_W = 640
DEFAULT_CAM_H = 480

# Camera-space positions of the four screen corners for the default rig
# (top-left, top-right, bottom-right, bottom-left).
DEFAULT_QUAD: tuple[Point, Point, Point, Point] = (
    (40.0, 30.0),
    (600.0, 42.0),
    (608.0, 452.0),
    (34.0, 446.0),
)

# Red-filter model: background red passes, green and blue are crushed.
DEFAULT_AMBIENT = (1.0, 0.15, 0.15)
SPOT_PEAK = 255.0
SPOT_SIGMA = 1.2
SPOT_RED_BLEED = 0.55
SPOT_GREEN_BLEED = 0.15
# Spot pixels at or above this fraction of the peak form the ground-truth
# core region used by the threshold histogram.
CORE_FRACTION = 0.83

# Noise level at which the spot-minimum histogram's lowest populated bin
# sits just above the detection threshold (tuned against that histogram).
REFERENCE_NOISE_SIGMA = 3.0
# Radial distortion producing roughly a ten-pixel worst-case mapping error
# on the default rig (tuned against the accuracy metric).
REFERENCE_K1 = -0.05

BLOCK = 256
BACKGROUND_KINDS = ("red", "green", "blue", "multi", "slides")

_NEWTON_ITERS = 12
_CAL_FRAME_BASE = 1_000_000  # noise-stream offset for calibration preamble frames


class ScenarioError(Exception):
    """Scenario parsing, validation, or calibration-stage failure."""


def make_background(kind: str, seed: int, screen_w: int = DEFAULT_SCREEN_W, screen_h: int = DEFAULT_SCREEN_H) -> np.ndarray:
    """Build a deterministic screen image (uint8 RGB, row-major).

    Block kinds (red, green, blue, multi) tile the screen with a 4x3 grid
    of 256-px blocks: single-channel kinds fill 11 blocks with distinct
    intensities of that channel plus one white block at a random position;
    multi fills all 12 with random colors.  The slides kind draws
    text-like bars on a light page and works at any resolution.
    """
    rng = np.random.default_rng(seed)
    img = np.zeros((screen_h, screen_w, 3), dtype=np.uint8)
    if kind == "slides":
        img[:, :] = (245, 245, 245)
        margin = screen_w // 10
        title_h = screen_h // 8
        img[margin : margin + title_h, margin : screen_w - margin] = (40, 60, 120)
        y = margin + title_h + screen_h // 12
        line_h = max(4, screen_h // 40)
        while y + line_h < screen_h - margin:
            width = int(rng.integers(screen_w // 3, screen_w - 2 * margin))
            shade = int(rng.integers(60, 140))
            img[y : y + line_h, margin : margin + width] = (shade, shade, shade)
            y += 2 * line_h
        return img
    if kind not in BACKGROUND_KINDS:
        raise ValueError(f"unknown background kind {kind!r}")
    cols, rows = screen_w // BLOCK, screen_h // BLOCK
    if cols * BLOCK != screen_w or rows * BLOCK != screen_h or cols * rows != 12:
        raise ValueError(f"block backgrounds need a 4x3 grid of {BLOCK}-px blocks, got {screen_w}x{screen_h}")
    if kind == "multi":
        colors = rng.integers(0, 256, size=(12, 3), dtype=np.uint8)
    else:
        channel = {"red": 0, "green": 1, "blue": 2}[kind]
        intensities = rng.choice(256, size=11, replace=False)
        colors = np.zeros((12, 3), dtype=np.uint8)
        colors[:11, channel] = intensities
        colors[11] = (255, 255, 255)
        rng.shuffle(colors, axis=0)
    for i in range(12):
        r, c = divmod(i, cols)
        img[r * BLOCK : (r + 1) * BLOCK, c * BLOCK : (c + 1) * BLOCK] = colors[i]
    return img


@dataclass(frozen=True)
class SceneConfig:
    """The fixed rig: resolutions, true warp, distortion, light, and spot shape."""

    quad: tuple[Point, Point, Point, Point] = DEFAULT_QUAD
    screen_w: int = DEFAULT_SCREEN_W
    screen_h: int = DEFAULT_SCREEN_H
    cam_w: int = DEFAULT_CAM_W
    cam_h: int = DEFAULT_CAM_H
    k1: float = 0.0
    noise_sigma: float = 0.0
    ambient: tuple[float, float, float] = DEFAULT_AMBIENT
    spot_peak: float = SPOT_PEAK
    spot_sigma: float = SPOT_SIGMA
    seed: int = 0

    def __post_init__(self) -> None:
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not (0 < self.spot_peak <= 255):
            raise ValueError("spot_peak must be in (0, 255]")
        if self.spot_sigma <= 0:
            raise ValueError("spot_sigma must be positive")
        if any(not (0 <= a <= 1) for a in self.ambient):
            raise ValueError("ambient scales must be in [0, 1]")
        quad = tuple((float(x), float(y)) for x, y in self.quad)
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "ambient", tuple(float(a) for a in self.ambient))

    @property
    def warp(self) -> Homography:
        """True screen-to-camera projective map (before distortion)."""
        return solve_homography(screen_corners(self.screen_w, self.screen_h), self.quad)

    @property
    def center(self) -> Point:
        return ((self.cam_w - 1) / 2.0, (self.cam_h - 1) / 2.0)

    @property
    def half_diagonal(self) -> float:
        cx, cy = self.center
        return float(np.hypot(cx, cy))

    def to_json_obj(self) -> dict:
        return {
            "quad": [[x, y] for x, y in self.quad],
            "screen": [self.screen_w, self.screen_h],
            "camera": [self.cam_w, self.cam_h],
            "k1": self.k1,
            "noise_sigma": self.noise_sigma,
            "ambient": list(self.ambient),
            "spot_peak": self.spot_peak,
            "spot_sigma": self.spot_sigma,
            "seed": self.seed,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SceneConfig":
        kwargs: dict = {}
        if "quad" in obj:
            kwargs["quad"] = tuple((float(x), float(y)) for x, y in obj["quad"])
        if "screen" in obj:
            kwargs["screen_w"], kwargs["screen_h"] = int(obj["screen"][0]), int(obj["screen"][1])
        if "camera" in obj:
            kwargs["cam_w"], kwargs["cam_h"] = int(obj["camera"][0]), int(obj["camera"][1])
        for name in ("k1", "noise_sigma", "spot_peak", "spot_sigma"):
            if name in obj:
                kwargs[name] = float(obj[name])
        if "ambient" in obj:
            kwargs["ambient"] = tuple(float(a) for a in obj["ambient"])
        if "seed" in obj:
            kwargs["seed"] = int(obj["seed"])
        return cls(**kwargs)


def distort_point(scene: SceneConfig, point: Point) -> Point:
    """Push an ideal camera point outward/inward radially: r' = r(1 + k1 r^2)."""
    if scene.k1 == 0.0:
        return (float(point[0]), float(point[1]))
    cx, cy = scene.center
    dx, dy = point[0] - cx, point[1] - cy
    r = np.hypot(dx, dy) / scene.half_diagonal
    s = 1.0 + scene.k1 * r * r
    return (cx + dx * s, cy + dy * s)


def undistort_point(scene: SceneConfig, point: Point) -> Point:
    """Invert the radial model by Newton iteration on the scalar radius."""
    if scene.k1 == 0.0:
        return (float(point[0]), float(point[1]))
    cx, cy = scene.center
    dx, dy = point[0] - cx, point[1] - cy
    robs = float(np.hypot(dx, dy)) / scene.half_diagonal
    if robs == 0.0:
        return (cx, cy)
    r = robs
    for _ in range(_NEWTON_ITERS):
        f = r * (1.0 + scene.k1 * r * r) - robs
        fp = 1.0 + 3.0 * scene.k1 * r * r
        r -= f / fp
    s = r / robs
    return (cx + dx * s, cy + dy * s)


def camera_spot(scene: SceneConfig, screen_point: Point) -> Point:
    """Where the camera sees a laser held at the given screen position."""
    return distort_point(scene, map_point(scene.warp, screen_point))


@dataclass(frozen=True)
class GroundTruth:
    """Per-frame truth emitted alongside every rendered frame."""

    on: bool
    screen: Point | None = None
    camera: Point | None = None  # observed (post-distortion) spot center
    core: tuple[tuple[int, int], ...] = ()  # pixels at >= CORE_FRACTION of peak

    def to_json_obj(self) -> dict:
        obj: dict = {"on": self.on}
        if self.screen is not None:
            obj["screen"] = [self.screen[0], self.screen[1]]
        if self.camera is not None:
            obj["camera"] = [self.camera[0], self.camera[1]]
        if self.core:
            obj["core"] = [[x, y] for x, y in self.core]
        return obj


class Renderer:
    """Renders frames for one scene and background.

    The warped, attenuated background is computed once; each frame adds
    the spot and fresh noise.  Rendering is pure given (scene, background,
    laser state, frame index).
    """

    def __init__(self, scene: SceneConfig, background: np.ndarray | None = None):
        self.scene = scene
        if background is None:
            background = np.zeros((scene.screen_h, scene.screen_w, 3), dtype=np.uint8)
        if background.shape != (scene.screen_h, scene.screen_w, 3):
            raise ValueError(
                f"background shape {background.shape} does not match screen {scene.screen_w}x{scene.screen_h}"
            )
        self._base = self._warp_background(background.astype(np.float32))

    def _warp_background(self, background: np.ndarray) -> np.ndarray:
        scene = self.scene
        xs, ys = np.meshgrid(np.arange(scene.cam_w, dtype=np.float64), np.arange(scene.cam_h, dtype=np.float64))
        if scene.k1 != 0.0:
            cx, cy = scene.center
            dx, dy = xs - cx, ys - cy
            robs = np.hypot(dx, dy) / scene.half_diagonal
            r = robs.copy()
            for _ in range(_NEWTON_ITERS):
                f = r * (1.0 + scene.k1 * r * r) - robs
                fp = 1.0 + 3.0 * scene.k1 * r * r
                r = r - f / fp
            with np.errstate(invalid="ignore", divide="ignore"):
                s = np.where(robs > 0, r / robs, 1.0)
            xs, ys = cx + dx * s, cy + dy * s
        inv = scene.warp.inverse().p
        w = inv[2, 0] * xs + inv[2, 1] * ys + inv[2, 2]
        with np.errstate(invalid="ignore", divide="ignore"):
            sx = (inv[0, 0] * xs + inv[0, 1] * ys + inv[0, 2]) / w
            sy = (inv[1, 0] * xs + inv[1, 1] * ys + inv[1, 2]) / w
        valid = (
            (np.abs(w) > 1e-12)
            & (sx >= 0.0)
            & (sx <= scene.screen_w - 1)
            & (sy >= 0.0)
            & (sy <= scene.screen_h - 1)
        )
        sx = np.where(valid, sx, 0.0)
        sy = np.where(valid, sy, 0.0)
        x0 = np.clip(np.floor(sx).astype(np.int64), 0, scene.screen_w - 2)
        y0 = np.clip(np.floor(sy).astype(np.int64), 0, scene.screen_h - 2)
        fx = (sx - x0).astype(np.float32)[..., None]
        fy = (sy - y0).astype(np.float32)[..., None]
        p00 = background[y0, x0]
        p01 = background[y0, x0 + 1]
        p10 = background[y0 + 1, x0]
        p11 = background[y0 + 1, x0 + 1]
        out = (1 - fy) * ((1 - fx) * p00 + fx * p01) + fy * ((1 - fx) * p10 + fx * p11)
        out *= valid[..., None]
        out *= np.asarray(self.scene.ambient, dtype=np.float32)
        return out

    def _spot_core(self, center: Point) -> tuple[tuple[int, int], ...]:
        scene = self.scene
        radius = scene.spot_sigma * np.sqrt(-2.0 * np.log(CORE_FRACTION))
        cx, cy = center
        pixels: list[tuple[int, int]] = []
        for py in range(int(np.floor(cy - radius)), int(np.ceil(cy + radius)) + 1):
            for px in range(int(np.floor(cx - radius)), int(np.ceil(cx + radius)) + 1):
                if 0 <= px < scene.cam_w and 0 <= py < scene.cam_h and np.hypot(px - cx, py - cy) <= radius:
                    pixels.append((px, py))
        if not pixels:
            px, py = int(round(cx)), int(round(cy))
            if 0 <= px < scene.cam_w and 0 <= py < scene.cam_h:
                pixels.append((px, py))
        return tuple(pixels)

    def render(self, laser_on: bool, screen_point: Point | None = None, frame_index: int = 0) -> tuple[Frame, GroundTruth]:
        """Produce one camera frame plus its ground truth."""
        scene = self.scene
        img = self._base.copy()
        truth = GroundTruth(on=False)
        if laser_on:
            if screen_point is None:
                raise ValueError("laser is on but no screen position given")
            x, y = float(screen_point[0]), float(screen_point[1])
            if not (0 <= x <= scene.screen_w - 1 and 0 <= y <= scene.screen_h - 1):
                raise ValueError(f"laser position ({x}, {y}) is outside the screen")
            cxy = camera_spot(scene, (x, y))
            self._add_spot(img, cxy)
            truth = GroundTruth(on=True, screen=(x, y), camera=cxy, core=self._spot_core(cxy))
        if scene.noise_sigma > 0:
            rng = np.random.default_rng((scene.seed, frame_index))
            img = img + rng.normal(0.0, scene.noise_sigma, img.shape)
        out = np.clip(np.rint(img), 0, 255).astype(np.uint8)
        return Frame.from_rgb(out, index=frame_index), truth

    def _add_spot(self, img: np.ndarray, center: Point) -> None:
        scene = self.scene
        cx, cy = center
        half = int(np.ceil(5 * scene.spot_sigma))
        x0 = max(0, int(np.floor(cx)) - half)
        x1 = min(scene.cam_w - 1, int(np.floor(cx)) + half + 1)
        y0 = max(0, int(np.floor(cy)) - half)
        y1 = min(scene.cam_h - 1, int(np.floor(cy)) + half + 1)
        if x1 < x0 or y1 < y0:
            return
        xs = np.arange(x0, x1 + 1, dtype=np.float64)
        ys = np.arange(y0, y1 + 1, dtype=np.float64)
        gx = xs - cx
        gy = ys - cy
        g = np.exp(-(gx[None, :] ** 2 + gy[:, None] ** 2) / (2.0 * scene.spot_sigma**2)) * scene.spot_peak
        patch = img[y0 : y1 + 1, x0 : x1 + 1]
        patch[:, :, 0] += SPOT_RED_BLEED * g
        patch[:, :, 1] += SPOT_GREEN_BLEED * g
        patch[:, :, 2] += g


def render(
    scene: SceneConfig,
    background: np.ndarray | None,
    laser_on: bool,
    screen_point: Point | None = None,
    frame_index: int = 0,
) -> tuple[Frame, GroundTruth]:
    """One-shot rendering convenience; builds a throwaway Renderer."""
    return Renderer(scene, background).render(laser_on, screen_point, frame_index)


@dataclass(frozen=True)
class Step:
    """One scripted frame: beam state and screen position."""

    f: int
    on: bool
    x: float | None = None
    y: float | None = None

    def __post_init__(self) -> None:
        if self.on and (self.x is None or self.y is None):
            raise ScenarioError(f"step at frame {self.f} is on but has no position")

    @property
    def point(self) -> Point | None:
        return None if not self.on else (float(self.x), float(self.y))


@dataclass(frozen=True)
class Expectation:
    """One golden event: exact frame and kind, optional position within 1 px."""

    f: int
    kind: str
    x: float | None = None
    y: float | None = None


@dataclass(frozen=True)
class BackgroundSpec:
    kind: str = "multi"
    seed: int = 0


@dataclass(frozen=True)
class Scenario:
    """A scripted run: scene, background, per-frame steps, optional golden events."""

    scene: SceneConfig = field(default_factory=SceneConfig)
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    steps: tuple[Step, ...] = ()
    expect: tuple[Expectation, ...] | None = None

    def __post_init__(self) -> None:
        last = None
        for s in self.steps:
            if s.f < 0:
                raise ScenarioError(f"step frames must be non-negative (frame {s.f})")
            if last is not None and s.f <= last:
                raise ScenarioError(f"step frames must be strictly increasing (frame {s.f})")
            last = s.f

    def to_json_obj(self) -> dict:
        obj: dict = {
            "scene": self.scene.to_json_obj(),
            "background": {"kind": self.background.kind, "seed": self.background.seed},
            "steps": [
                {"f": s.f, "on": s.on, **({"x": s.x, "y": s.y} if s.on else {})} for s in self.steps
            ],
        }
        if self.expect is not None:
            obj["expect"] = [
                {"f": e.f, "kind": e.kind, **({"x": e.x, "y": e.y} if e.x is not None else {})}
                for e in self.expect
            ]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
        try:
            scene = SceneConfig.from_json_obj(obj.get("scene", {}))
            bg = obj.get("background", {})
            background = BackgroundSpec(kind=bg.get("kind", "multi"), seed=int(bg.get("seed", 0)))
            steps = tuple(
                Step(f=int(s["f"]), on=bool(s["on"]), x=s.get("x"), y=s.get("y")) for s in obj.get("steps", [])
            )
            expect = None
            if "expect" in obj:
                expect = tuple(
                    Expectation(f=int(e["f"]), kind=str(e["kind"]), x=e.get("x"), y=e.get("y"))
                    for e in obj["expect"]
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from exc
        return cls(scene=scene, background=background, steps=steps, expect=expect)


def load_scenario(path: str | Path) -> Scenario:
    return Scenario.from_json(Path(path).read_text())


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(scenario.to_json() + "\n")


@dataclass(frozen=True)
class ScenarioResult:
    """Everything a scenario run produced."""

    events: tuple[CommandEvent, ...]
    trace: Trace
    calibration: Calibration

    @property
    def command_events(self) -> tuple[CommandEvent, ...]:
        return tuple(e for e in self.events if e.kind in COMMAND_KINDS)


def calibrate_scene(
    renderer: Renderer,
    detector: DetectorConfig | None = None,
    samples_per_corner: int = 10,
) -> Calibration:
    """Run the four-corner calibration against rendered frames.

    The virtual presenter holds the beam on each screen corner until that
    corner's samples are collected, with a retry budget for undetected
    frames.  Degenerate geometry or an exhausted budget is a scenario
    error.
    """
    scene = renderer.scene
    session = CalibrationSession(scene.screen_w, scene.screen_h, samples_per_corner)
    targets = screen_corners(scene.screen_w, scene.screen_h)
    frame_index = _CAL_FRAME_BASE
    for corner, target in enumerate(targets):
        budget = samples_per_corner * 4
        while session.current_corner == corner and not session.done:
            if budget == 0:
                raise ScenarioError(f"calibration failed: corner {corner} not detected reliably")
            frame, _ = renderer.render(True, target, frame_index)
            frame_index += 1
            budget -= 1
            progress = session.feed(detect(frame, detector))
            if progress.failed:
                raise ScenarioError(f"calibration failed: {progress.reason}")
    assert session.result is not None
    return session.result


def run_scenario(
    scenario: Scenario,
    detector: DetectorConfig | None = None,
    controller_cfg: ControllerConfig | None = None,
    fps: float = DEFAULT_FPS,
) -> ScenarioResult:
    """Render and process every scripted frame through the full pipeline."""
    scene = scenario.scene
    background = make_background(scenario.background.kind, scenario.background.seed, scene.screen_w, scene.screen_h)
    renderer = Renderer(scene, background)
    calibration = calibrate_scene(renderer, detector)
    if controller_cfg is None:
        controller_cfg = ControllerConfig(screen_w=scene.screen_w, screen_h=scene.screen_h)
    controller = Controller(controller_cfg)
    events: list[CommandEvent] = []
    frames: list[TraceFrame] = []
    for step in scenario.steps:
        frame, truth = renderer.render(step.on, step.point, step.f)
        det = detect(frame, detector)
        centroid = det.centroid if det is not None else None
        inside = centroid is not None and calibration.contains(centroid)
        mapped = calibration.map(centroid) if inside else None
        frame_events = controller.step(mapped, step.f)
        events.extend(frame_events)
        frames.append(
            TraceFrame(
                frame=step.f,
                laser_on=step.on,
                true_screen=truth.screen,
                detected=det is not None,
                camera=centroid,
                in_roi=inside,
                mapped=mapped,
                mode=controller.mode.value,
                events=tuple(frame_events),
            )
        )
    trace = Trace(frames=tuple(frames), screen_w=scene.screen_w, screen_h=scene.screen_h, fps=fps)
    return ScenarioResult(events=tuple(events), trace=trace, calibration=calibration)


def compare_expected(result: ScenarioResult, scenario: Scenario) -> list[str]:
    """Diff produced command events against the golden list; empty means match.

    Comparison is exact on (frame, kind); golden entries carrying a
    position must match x and y within one pixel.  The continuous
    MouseMove stream and InfoText status updates are not part of the
    golden contract.
    """
    if scenario.expect is None:
        return []
    actual = result.command_events
    diffs: list[str] = []
    for i, (exp, act) in enumerate(zip(scenario.expect, actual)):
        if exp.f != act.frame or exp.kind != act.kind.value:
            diffs.append(f"event {i}: expected {exp.kind}@{exp.f}, got {act.kind.value}@{act.frame}")
            continue
        if exp.x is not None:
            if act.point is None:
                diffs.append(f"event {i}: expected position ({exp.x}, {exp.y}), got none")
            elif abs(act.point[0] - exp.x) > 1.0 or abs(act.point[1] - exp.y) > 1.0:
                diffs.append(
                    f"event {i}: expected ({exp.x}, {exp.y}), got ({act.point[0]:.2f}, {act.point[1]:.2f})"
                )
    for exp in scenario.expect[len(actual) :]:
        diffs.append(f"missing expected event {exp.kind}@{exp.f}")
    for act in actual[len(scenario.expect) :]:
        diffs.append(f"unexpected event {act.kind.value}@{act.frame}")
    return diffs
