"""Gesture state machine turning mapped laser positions into commands.

The screen is carved into coarse regions (an upper band split in half, a
middle band, and a lower band split in thirds).  Timed region sequences
trigger slide navigation, and a mouse-control mode adds dwell clicks plus
stroke gestures that arm drag-and-drop or right-click.  All windows are
counted in elapsed frame indices; losing the spot does not pause them.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

Point = tuple[float, float]

DEFAULT_SCREEN_W = 1024
DEFAULT_SCREEN_H = 768


class Region(str, Enum):
    UPPER_LEFT = "UpperLeft"
    UPPER_RIGHT = "UpperRight"
    MIDDLE = "Middle"
    LOWER_LEFT = "LowerLeft"
    LOWER_MIDDLE = "LowerMiddle"
    LOWER_RIGHT = "LowerRight"
    OUTSIDE = "Outside"


UPPER_REGIONS = (Region.UPPER_LEFT, Region.UPPER_RIGHT)


class Mode(str, Enum):
    NORMAL = "Normal"
    MOUSE = "MouseControl"
    DRAG_ARMED = "DragArmed"
    DRAG_ACTIVE = "DragActive"
    RIGHT_CLICK_ARMED = "RightClickArmed"


MOUSE_FAMILY = (Mode.MOUSE, Mode.DRAG_ARMED, Mode.DRAG_ACTIVE, Mode.RIGHT_CLICK_ARMED)


class EventKind(str, Enum):
    NEXT_SLIDE = "NextSlide"
    PREV_SLIDE = "PrevSlide"
    MOUSE_MODE_ON = "MouseModeOn"
    MOUSE_MODE_OFF = "MouseModeOff"
    MOUSE_MOVE = "MouseMove"
    LEFT_CLICK = "LeftClick"
    DOUBLE_CLICK = "DoubleClick"
    DRAG_ARMED = "DragArmed"
    DRAG_START = "DragStart"
    DRAG_END = "DragEnd"
    RIGHT_CLICK_ARMED = "RightClickArmed"
    RIGHT_CLICK = "RightClick"
    INFO_TEXT = "InfoText"


# Events that carry a screen position.
POSITIONED_KINDS = frozenset(
    {
        EventKind.MOUSE_MOVE,
        EventKind.LEFT_CLICK,
        EventKind.DOUBLE_CLICK,
        EventKind.DRAG_START,
        EventKind.DRAG_END,
        EventKind.RIGHT_CLICK,
    }
)

# Discrete commands; excludes the continuous MouseMove stream and the
# informational status-text events.
COMMAND_KINDS = frozenset(EventKind) - {EventKind.MOUSE_MOVE, EventKind.INFO_TEXT}

MODE_INFO = {
    Mode.NORMAL: "Presentation mode active",
    Mode.MOUSE: "Mouse control mode active",
    Mode.DRAG_ARMED: "Drag and drop enabled",
    Mode.DRAG_ACTIVE: "Dragging",
    Mode.RIGHT_CLICK_ARMED: "Right click enabled",
}


def classify_region(
    point: Point | None,
    screen_w: int = DEFAULT_SCREEN_W,
    screen_h: int = DEFAULT_SCREEN_H,
) -> Region:
    """Map a screen point to its gesture region.

    The upper band is the top third split at the vertical midline, the
    lower band is the bottom third split into horizontal thirds, and
    everything between is Middle.  Points outside the screen bounds are
    Outside.
    """
    if point is None:
        return Region.OUTSIDE
    x, y = point
    if not (0 <= x <= screen_w and 0 <= y <= screen_h):
        return Region.OUTSIDE
    if y < screen_h / 3:
        return Region.UPPER_LEFT if x < screen_w / 2 else Region.UPPER_RIGHT
    if y < 2 * screen_h / 3:
        return Region.MIDDLE
    if x < screen_w / 3:
        return Region.LOWER_LEFT
    if x < 2 * screen_w / 3:
        return Region.LOWER_MIDDLE
    return Region.LOWER_RIGHT


@dataclass(frozen=True)
class ControllerConfig:
    """Timing and geometry knobs for the gesture machine (all in frames)."""

    screen_w: int = DEFAULT_SCREEN_W
    screen_h: int = DEFAULT_SCREEN_H
    w1: int = 5  # frames allowed from a lower corner to the middle band
    w2: int = 10  # frames allowed from the middle band to the upper corner
    mouse_arm_window: int = 10  # lower-middle to upper band
    mouse_off_frames: int = 5  # consecutive absent frames that exit mouse mode
    dwell_click: int = 5  # frames in the vicinity box for a click
    dwell_double: int = 10  # frames in the vicinity box for a double click
    vicinity_frac: float = 0.02  # vicinity box half-size as a screen fraction
    stroke_window: int = 15  # trail length for stroke detection
    stroke_major_frac: float = 0.20  # stroke extent along its axis, screen fraction
    stroke_minor_frac: float = 0.10  # max off-axis extent, screen fraction
    disarm_absent_frames: int = 2  # absences that cancel an armed gesture

    def __post_init__(self) -> None:
        for name in (
            "w1",
            "w2",
            "mouse_arm_window",
            "mouse_off_frames",
            "dwell_click",
            "stroke_window",
            "disarm_absent_frames",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.dwell_double <= self.dwell_click:
            raise ValueError("dwell_double must exceed dwell_click")
        if self.screen_w < 1 or self.screen_h < 1:
            raise ValueError("screen size must be positive")
        if not (0 < self.vicinity_frac < 1):
            raise ValueError("vicinity_frac must be in (0, 1)")
        if not (0 < self.stroke_minor_frac < self.stroke_major_frac < 1):
            raise ValueError("stroke fractions must satisfy 0 < minor < major < 1")


@dataclass(frozen=True)
class CommandEvent:
    """One controller output: a command, a cursor move, or a status text."""

    kind: EventKind
    frame: int
    point: Point | None = None
    text: str | None = None

    def to_json_obj(self) -> dict:
        obj: dict = {"frame": self.frame, "kind": self.kind.value}
        if self.point is not None:
            obj["x"] = self.point[0]
            obj["y"] = self.point[1]
        if self.text is not None:
            obj["text"] = self.text
        return obj


@dataclass
class _Pending:
    """An in-flight multi-region gesture with its next stage and deadline."""

    gesture: str  # "next", "prev", or "mouse"
    stage: str  # "await_middle" or "await_upper"
    deadline: int  # last frame index at which the next hit still counts


class Controller:
    """Single-owner gesture state machine.

    Feed one observation per frame through :meth:`step`; it returns the
    events for that frame in emission order.  Frame indices must be
    strictly increasing but need not be consecutive.
    """

    def __init__(self, config: ControllerConfig | None = None):
        self.config = config or ControllerConfig()
        self.mode = Mode.NORMAL
        self.info_text = MODE_INFO[Mode.NORMAL]
        self._last_frame: int | None = None
        self._pending: list[_Pending] = []
        self._absent = 0
        self._last_point: Point | None = None
        self._trail: deque[tuple[int, Point]] = deque(maxlen=self.config.stroke_window)
        self._dwell_anchor: Point | None = None
        self._dwell_count = 0

    # -- helpers ---------------------------------------------------------

    def _set_mode(self, mode: Mode, frame: int, events: list[CommandEvent]) -> None:
        self.mode = mode
        self.info_text = MODE_INFO[mode]
        self._trail.clear()
        self._dwell_anchor = None
        self._dwell_count = 0
        events.append(CommandEvent(EventKind.INFO_TEXT, frame, text=self.info_text))

    def _expire_pending(self, frame: int) -> None:
        self._pending = [p for p in self._pending if frame <= p.deadline]

    def _start(self, gesture: str, stage: str, frame: int, window: int) -> None:
        self._pending = [p for p in self._pending if p.gesture != gesture]
        self._pending.append(_Pending(gesture, stage, frame + window))

    def _take(self, gesture: str, stage: str) -> _Pending | None:
        for p in self._pending:
            if p.gesture == gesture and p.stage == stage:
                self._pending.remove(p)
                return p
        return None

    def _in_vicinity(self, anchor: Point, point: Point) -> bool:
        dx = abs(point[0] - anchor[0])
        dy = abs(point[1] - anchor[1])
        return dx <= self.config.vicinity_frac * self.config.screen_w and dy <= self.config.vicinity_frac * self.config.screen_h

    # -- normal (presentation) mode ---------------------------------------

    def _step_normal(self, point: Point | None, frame: int) -> list[CommandEvent]:
        cfg = self.config
        events: list[CommandEvent] = []
        self._expire_pending(frame)
        if point is None:
            return events
        region = classify_region(point, cfg.screen_w, cfg.screen_h)
        if region is Region.LOWER_LEFT:
            self._start("next", "await_middle", frame, cfg.w1)
        elif region is Region.LOWER_RIGHT:
            self._start("prev", "await_middle", frame, cfg.w1)
        elif region is Region.LOWER_MIDDLE:
            self._start("mouse", "await_upper", frame, cfg.mouse_arm_window)
        elif region is Region.MIDDLE:
            for gesture in ("next", "prev"):
                if self._take(gesture, "await_middle"):
                    self._start(gesture, "await_upper", frame, cfg.w2)
        elif region in UPPER_REGIONS:
            if self._take("mouse", "await_upper"):
                self._pending.clear()
                events.append(CommandEvent(EventKind.MOUSE_MODE_ON, frame))
                self._set_mode(Mode.MOUSE, frame, events)
                self._last_point = point
                self._absent = 0
                return events
            wanted = "next" if region is Region.UPPER_RIGHT else "prev"
            if self._take(wanted, "await_upper"):
                self._pending.clear()
                kind = EventKind.NEXT_SLIDE if wanted == "next" else EventKind.PREV_SLIDE
                events.append(CommandEvent(kind, frame))
        return events

    # -- mouse-control family ---------------------------------------------

    def _step_mouse(self, point: Point | None, frame: int) -> list[CommandEvent]:
        cfg = self.config
        events: list[CommandEvent] = []
        if point is None:
            self._absent += 1
            self._trail.clear()
            self._dwell_anchor = None
            self._dwell_count = 0
            if self._absent == cfg.disarm_absent_frames and self.mode in (
                Mode.DRAG_ARMED,
                Mode.DRAG_ACTIVE,
                Mode.RIGHT_CLICK_ARMED,
            ):
                if self.mode is Mode.DRAG_ACTIVE and self._last_point is not None:
                    events.append(CommandEvent(EventKind.DRAG_END, frame, point=self._last_point))
                self._set_mode(Mode.MOUSE, frame, events)
            if self._absent == cfg.mouse_off_frames:
                if self.mode is Mode.DRAG_ACTIVE and self._last_point is not None:
                    events.append(CommandEvent(EventKind.DRAG_END, frame, point=self._last_point))
                events.append(CommandEvent(EventKind.MOUSE_MODE_OFF, frame))
                self._set_mode(Mode.NORMAL, frame, events)
                self._pending.clear()
                self._absent = 0
                self._last_point = None
            return events

        self._absent = 0
        self._last_point = point
        events.append(CommandEvent(EventKind.MOUSE_MOVE, frame, point=point))

        if self._dwell_anchor is not None and self._in_vicinity(self._dwell_anchor, point):
            self._dwell_count += 1
        else:
            self._dwell_anchor = point
            self._dwell_count = 1

        anchor = self._dwell_anchor
        if self.mode is Mode.MOUSE:
            if self._dwell_count == cfg.dwell_click:
                events.append(CommandEvent(EventKind.LEFT_CLICK, frame, point=anchor))
            elif self._dwell_count == cfg.dwell_double:
                events.append(CommandEvent(EventKind.DOUBLE_CLICK, frame, point=anchor))
                self._dwell_anchor = None
                self._dwell_count = 0
        elif self.mode is Mode.DRAG_ARMED:
            if self._dwell_count == cfg.dwell_click:
                events.append(CommandEvent(EventKind.DRAG_START, frame, point=anchor))
                self._set_mode(Mode.DRAG_ACTIVE, frame, events)
        elif self.mode is Mode.DRAG_ACTIVE:
            if self._dwell_count == cfg.dwell_click:
                events.append(CommandEvent(EventKind.DRAG_END, frame, point=anchor))
                self._set_mode(Mode.MOUSE, frame, events)
        elif self.mode is Mode.RIGHT_CLICK_ARMED:
            if self._dwell_count == cfg.dwell_click:
                events.append(CommandEvent(EventKind.RIGHT_CLICK, frame, point=anchor))
                self._set_mode(Mode.MOUSE, frame, events)

        if self.mode is Mode.MOUSE:
            self._trail.append((frame, point))
            stroke = self._detect_stroke()
            if stroke == "vertical":
                events.append(CommandEvent(EventKind.DRAG_ARMED, frame))
                self._set_mode(Mode.DRAG_ARMED, frame, events)
            elif stroke == "horizontal":
                events.append(CommandEvent(EventKind.RIGHT_CLICK_ARMED, frame))
                self._set_mode(Mode.RIGHT_CLICK_ARMED, frame, events)
        return events

    def _detect_stroke(self) -> str | None:
        """Classify the recent trail as a vertical or horizontal stroke.

        A stroke spans more than the major fraction of the screen along one
        axis while staying within the minor fraction on the other.
        """
        cfg = self.config
        if len(self._trail) < 2:
            return None
        xs = [p[0] for _, p in self._trail]
        ys = [p[1] for _, p in self._trail]
        x_extent = max(xs) - min(xs)
        y_extent = max(ys) - min(ys)
        if y_extent > cfg.stroke_major_frac * cfg.screen_h and x_extent < cfg.stroke_minor_frac * cfg.screen_w:
            return "vertical"
        if x_extent > cfg.stroke_major_frac * cfg.screen_w and y_extent < cfg.stroke_minor_frac * cfg.screen_h:
            return "horizontal"
        return None

    # -- public API --------------------------------------------------------

    def step(self, point: Point | None, frame: int) -> list[CommandEvent]:
        """Consume the mapped screen point for one frame (None when absent)."""
        if self._last_frame is not None and frame <= self._last_frame:
            raise ValueError(f"frame indices must be strictly increasing ({frame} after {self._last_frame})")
        self._last_frame = frame
        if self.mode is Mode.NORMAL:
            return self._step_normal(point, frame)
        return self._step_mouse(point, frame)

    def run(self, observations: Iterable[tuple[int, Point | None]]) -> list[CommandEvent]:
        """Feed (frame, point) pairs in order and collect every event."""
        out: list[CommandEvent] = []
        for frame, point in observations:
            out.extend(self.step(point, frame))
        return out


def events_to_jsonl(events: Sequence[CommandEvent]) -> str:
    """Serialize events one JSON object per line."""
    return "".join(json.dumps(e.to_json_obj()) + "\n" for e in events)
