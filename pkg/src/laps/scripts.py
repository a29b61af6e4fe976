"""Builders and loaders for the bundled scenario scripts.

Each builder returns a deterministic Scenario; the JSON files shipped
under ``laps/scenarios/`` are generated from these builders and the tests
hold the two in sync.  Gesture scripts keep generous margins from region
boundaries so mapping error cannot flip a region classification.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

from .simcam import (
    REFERENCE_K1,
    REFERENCE_NOISE_SIGMA,
    BackgroundSpec,
    Expectation,
    Scenario,
    SceneConfig,
    ScenarioError,
    Step,
    save_scenario,
)

# Background seed for the accuracy scenes: a red block layout whose white
# block sits away from the screen corners, keeping the calibration
# corners on blue-free blocks.
ACCURACY_BACKGROUND_SEED = 0

_GESTURE_SCENE = SceneConfig(noise_sigma=0.0, k1=0.0)
_GESTURE_BG = BackgroundSpec(kind="multi", seed=1)


def _gesture(steps, expect) -> Scenario:
    return Scenario(scene=_GESTURE_SCENE, background=_GESTURE_BG, steps=tuple(steps), expect=tuple(expect))


def _on(f: int, x: float, y: float) -> Step:
    return Step(f=f, on=True, x=x, y=y)


def _off(f: int) -> Step:
    return Step(f=f, on=False)


def next_slide() -> Scenario:
    """Lower-left, middle, upper-right inside the 5- and 10-frame windows."""
    return _gesture(
        [_on(0, 150, 700), _off(1), _off(2), _on(3, 512, 384), _off(4), _off(5), _off(6), _off(7), _on(8, 900, 100)],
        [Expectation(8, "NextSlide")],
    )


def prev_slide() -> Scenario:
    """Mirror image of the next-slide path."""
    return _gesture(
        [_on(0, 874, 700), _off(1), _off(2), _on(3, 512, 384), _off(4), _off(5), _off(6), _off(7), _on(8, 124, 100)],
        [Expectation(8, "PrevSlide")],
    )


def next_slide_timeout_middle() -> Scenario:
    """Middle hit one frame past the first window: no event."""
    return _gesture(
        [_on(0, 150, 700), _off(1), _off(2), _off(3), _off(4), _off(5), _on(6, 512, 384), _off(7), _on(8, 900, 100)],
        [],
    )


def next_slide_timeout_upper() -> Scenario:
    """Upper hit one frame past the second window: no event."""
    steps = [_on(0, 150, 700), _on(1, 512, 384)]
    steps += [_off(f) for f in range(2, 12)]
    steps.append(_on(12, 900, 100))
    return _gesture(steps, [])


def mouse_mode() -> Scenario:
    """Arm from the lower-middle, enter on an upper hit, drop out on absence."""
    steps = [_on(0, 512, 700), _off(1), _off(2), _off(3), _on(4, 260, 100)]
    steps += [_off(f) for f in range(5, 10)]
    return _gesture(steps, [Expectation(4, "MouseModeOn"), Expectation(9, "MouseModeOff")])


def single_click() -> Scenario:
    """Five-frame dwell fires one left click."""
    steps = [_on(0, 512, 700), _off(1), _on(2, 700, 200)]
    steps += [_on(f, 400, 400) for f in range(3, 8)]
    return _gesture(steps, [Expectation(2, "MouseModeOn"), Expectation(7, "LeftClick")])


def double_click() -> Scenario:
    """Ten-frame dwell fires the left click then the double click."""
    steps = [_on(0, 512, 700), _off(1), _on(2, 700, 200)]
    steps += [_on(f, 400, 400) for f in range(3, 13)]
    return _gesture(
        steps,
        [Expectation(2, "MouseModeOn"), Expectation(7, "LeftClick"), Expectation(12, "DoubleClick")],
    )


def drag_drop() -> Scenario:
    """Vertical stroke arms drag; dwell starts it; move; dwell releases it."""
    steps = [_on(0, 512, 700), _off(1), _on(2, 700, 200)]
    steps += [_on(3, 500, 600), _on(4, 500, 540), _on(5, 500, 480), _on(6, 500, 420)]
    steps += [_on(f, 500, 420) for f in range(7, 12)]
    steps += [_on(12, 560, 420), _on(13, 620, 420)]
    steps += [_on(f, 620, 420) for f in range(14, 18)]
    return _gesture(
        steps,
        [
            Expectation(2, "MouseModeOn"),
            Expectation(6, "DragArmed"),
            Expectation(11, "DragStart"),
            Expectation(17, "DragEnd"),
        ],
    )


def right_click() -> Scenario:
    """Horizontal stroke arms right-click; dwell fires it."""
    steps = [_on(0, 512, 700), _off(1), _on(2, 700, 200)]
    steps += [_on(3, 300, 400), _on(4, 390, 400), _on(5, 480, 400), _on(6, 570, 400)]
    steps += [_on(f, 570, 400) for f in range(7, 12)]
    return _gesture(
        steps,
        [Expectation(2, "MouseModeOn"), Expectation(6, "RightClickArmed"), Expectation(11, "RightClick")],
    )


def reliability_sweep(
    noise_sigma: float = REFERENCE_NOISE_SIGMA,
    speeds: tuple[float, ...] = tuple(range(0, 2001, 200)),
    frames_per_speed: int = 20,
    fps: float = 30.0,
) -> Scenario:
    """Laser gliding at stepped speeds, bouncing inside a margin box."""
    scene = SceneConfig(noise_sigma=noise_sigma)
    margin = 60.0
    lo_x, hi_x = margin, scene.screen_w - 1 - margin
    lo_y, hi_y = margin, scene.screen_h - 1 - margin
    x, y = 200.0, 200.0
    heading = 0.9
    dx, dy = math.cos(heading), math.sin(heading)
    steps = []
    f = 0
    for speed in speeds:
        step_len = speed / fps
        for _ in range(frames_per_speed):
            steps.append(_on(f, round(x, 3), round(y, 3)))
            f += 1
            x += dx * step_len
            y += dy * step_len
            if x < lo_x or x > hi_x:
                dx = -dx
                x = min(max(x, 2 * lo_x - x), 2 * hi_x - x)
            if y < lo_y or y > hi_y:
                dy = -dy
                y = min(max(y, 2 * lo_y - y), 2 * hi_y - y)
    return Scenario(scene=scene, background=BackgroundSpec(kind="multi", seed=1), steps=tuple(steps), expect=None)


def _accuracy(k1: float) -> Scenario:
    """Stationary spots, two frames each, covering all nine screen regions.

    Sample points sit well away from the 256-px block boundaries so the
    spot always lands on locally uniform background.
    """
    scene = SceneConfig(noise_sigma=0.0, k1=k1)
    steps = []
    f = 0
    for row in range(3):
        for col in range(3):
            for fx, fy in ((0.3, 0.3), (0.7, 0.3), (0.3, 0.7), (0.7, 0.7)):
                x = round(scene.screen_w / 3 * (col + fx), 3)
                y = round(scene.screen_h / 3 * (row + fy), 3)
                steps.append(_on(f, x, y))
                steps.append(_on(f + 1, x, y))
                f += 2
    return Scenario(
        scene=scene,
        background=BackgroundSpec(kind="red", seed=ACCURACY_BACKGROUND_SEED),
        steps=tuple(steps),
        expect=None,
    )


def accuracy_ideal() -> Scenario:
    return _accuracy(k1=0.0)


def accuracy_distorted() -> Scenario:
    return _accuracy(k1=REFERENCE_K1)


BUILDERS = {
    "next_slide": next_slide,
    "prev_slide": prev_slide,
    "next_slide_timeout_middle": next_slide_timeout_middle,
    "next_slide_timeout_upper": next_slide_timeout_upper,
    "mouse_mode": mouse_mode,
    "single_click": single_click,
    "double_click": double_click,
    "drag_drop": drag_drop,
    "right_click": right_click,
    "reliability_sweep": reliability_sweep,
    "accuracy_ideal": accuracy_ideal,
    "accuracy_distorted": accuracy_distorted,
}

GESTURE_NAMES = (
    "next_slide",
    "prev_slide",
    "next_slide_timeout_middle",
    "next_slide_timeout_upper",
    "mouse_mode",
    "single_click",
    "double_click",
    "drag_drop",
    "right_click",
)


def bundled_names() -> list[str]:
    return sorted(BUILDERS)


def load_bundled(name: str) -> Scenario:
    """Load a scenario shipped with the package by bare name."""
    path = resources.files("laps").joinpath("scenarios", f"{name}.json")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ScenarioError(
            f"no bundled scenario named {name!r}; available: {', '.join(bundled_names())}"
        ) from None
    return Scenario.from_json(text)


def write_bundled(out_dir: str | Path) -> list[Path]:
    """Regenerate every bundled scenario file from its builder."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, builder in BUILDERS.items():
        path = out / f"{name}.json"
        save_scenario(builder(), path)
        written.append(path)
    return written
