"""Session server: live pipeline driven by a virtual laser over a socket.

Clients send normalized laser positions; the server renders the synthetic
camera view, runs detection, calibration or mapping, and the gesture
machine, and streams back frame results, events, calibration progress,
and status text.  One session per connection; sessions share nothing.
"""

from __future__ import annotations

import json
from dataclasses import replace
from typing import Any

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .calib import Calibration, CalibrationSession, screen_corners
from .control import Controller, ControllerConfig, EventKind, Mode, classify_region
from .simcam import BackgroundSpec, Renderer, SceneConfig, make_background
from .spot import DetectorConfig, detect

PHASE_UNCALIBRATED = "uncalibrated"
PHASE_CALIBRATING = "calibrating"
PHASE_RUNNING = "running"

_CORNER_PROMPTS = (
    "Point the laser at the top-left corner",
    "Point the laser at the top-right corner",
    "Point the laser at the bottom-right corner",
    "Point the laser at the bottom-left corner",
)


def _error(message: str) -> dict:
    return {"type": "error", "message": message}


def _info(text: str) -> dict:
    return {"type": "info", "text": text}


class Session:
    """One presenter's pipeline: scene, detector, calibration, and gestures.

    step() consumes one decoded client message and returns the updates it
    produced, in order.  All state is owned by the session; messages are
    processed strictly in arrival order.
    """

    def __init__(
        self,
        scene: SceneConfig | None = None,
        background: BackgroundSpec | None = None,
        detector: DetectorConfig | None = None,
        controller_cfg: ControllerConfig | None = None,
    ):
        self.scene = scene or SceneConfig()
        self.background = background or BackgroundSpec(kind="multi", seed=1)
        self.detector = detector or DetectorConfig()
        self._controller_cfg = controller_cfg
        self.phase = PHASE_UNCALIBRATED
        self.calibration: Calibration | None = None
        self._cal_session: CalibrationSession | None = None
        self._last_seq: int | None = None
        self._frame = 0
        self._rebuild()

    def _rebuild(self) -> None:
        image = make_background(self.background.kind, self.background.seed, self.scene.screen_w, self.scene.screen_h)
        self.renderer = Renderer(self.scene, image)
        cfg = self._controller_cfg or ControllerConfig(screen_w=self.scene.screen_w, screen_h=self.scene.screen_h)
        self.controller = Controller(cfg)

    # -- message handlers --------------------------------------------------

    def step(self, msg: dict) -> list[dict]:
        """Process one client message; malformed input leaves the session unchanged."""
        if not isinstance(msg, dict) or "type" not in msg:
            return [_error("message must be an object with a 'type' field")]
        kind = msg["type"]
        if kind == "laser":
            return self._on_laser(msg)
        if kind == "start_calibration":
            return self._on_start_calibration()
        if kind == "reset":
            return self._on_reset()
        if kind == "config":
            return self._on_config(msg)
        return [_error(f"unknown message type {kind!r}")]

    def _on_start_calibration(self) -> list[dict]:
        self._cal_session = CalibrationSession(self.scene.screen_w, self.scene.screen_h)
        self.calibration = None
        self.phase = PHASE_CALIBRATING
        return [
            _info(_CORNER_PROMPTS[0]),
            {"type": "calibration", "corner": 0, "samples": 0, "done": False},
        ]

    def _on_reset(self) -> list[dict]:
        self.phase = PHASE_UNCALIBRATED
        self.calibration = None
        self._cal_session = None
        self._frame = 0
        self._last_seq = None
        self._rebuild()
        return [_info("Session reset")]

    def _on_config(self, msg: dict) -> list[dict]:
        try:
            scene = self.scene
            background = self.background
            detector = self.detector
            controller_cfg = self._controller_cfg
            if "scene" in msg:
                merged = scene.to_json_obj()
                merged.update(msg["scene"])
                scene = SceneConfig.from_json_obj(merged)
            if "background" in msg:
                bg = msg["background"]
                background = BackgroundSpec(
                    kind=bg.get("kind", background.kind), seed=int(bg.get("seed", background.seed))
                )
            if "detector" in msg:
                detector = replace(detector, **msg["detector"])
            if "controller" in msg:
                base = controller_cfg or ControllerConfig(screen_w=scene.screen_w, screen_h=scene.screen_h)
                controller_cfg = replace(base, **msg["controller"])
            probe = make_background(background.kind, background.seed, scene.screen_w, scene.screen_h)
            del probe
        except (TypeError, ValueError, KeyError) as exc:
            return [_error(f"bad config: {exc}")]
        self.scene = scene
        self.background = background
        self.detector = detector
        self._controller_cfg = controller_cfg
        self.phase = PHASE_UNCALIBRATED
        self.calibration = None
        self._cal_session = None
        self._frame = 0
        self._rebuild()
        return [_info("Configuration updated; recalibration required")]

    def _on_laser(self, msg: dict) -> list[dict]:
        try:
            seq = int(msg["seq"])
            on = bool(msg["on"])
            x = float(msg.get("x", 0.0))
            y = float(msg.get("y", 0.0))
        except (KeyError, TypeError, ValueError):
            return [_error("laser message needs numeric seq, boolean on, numeric x/y")]
        if self._last_seq is not None and seq <= self._last_seq:
            return [_error(f"out-of-order seq {seq} (last was {self._last_seq})")]
        self._last_seq = seq
        point = None
        if on:
            x = min(max(x, 0.0), 1.0)
            y = min(max(y, 0.0), 1.0)
            point = (x * (self.scene.screen_w - 1), y * (self.scene.screen_h - 1))
        frame_index = self._frame
        self._frame += 1
        frame, _truth = self.renderer.render(on, point, frame_index)
        det = detect(frame, self.detector)
        centroid = det.centroid if det is not None else None

        if self.phase == PHASE_CALIBRATING:
            return self._calibration_updates(seq, det, centroid)

        screen = None
        if self.phase == PHASE_RUNNING and centroid is not None and self.calibration is not None:
            if self.calibration.contains(centroid):
                screen = self.calibration.map(centroid)
        updates: list[dict] = []
        events = []
        if self.phase == PHASE_RUNNING:
            events = self.controller.step(screen, frame_index)
        updates.append(self._frame_result(seq, det, centroid, screen, mode=self.controller.mode.value))
        for event in events:
            if event.kind is EventKind.INFO_TEXT:
                updates.append(_info(event.text or ""))
            else:
                obj: dict[str, Any] = {"type": "event", "kind": event.kind.value, "frame": event.frame}
                if event.point is not None:
                    obj["x"], obj["y"] = event.point
                updates.append(obj)
        return updates

    def _frame_result(self, seq, det, centroid, screen, mode: str) -> dict:
        region = None
        if screen is not None:
            region = classify_region(screen, self.scene.screen_w, self.scene.screen_h).value
        return {
            "type": "frame_result",
            "seq": seq,
            "detected": det is not None,
            "camera": [centroid[0], centroid[1]] if centroid is not None else None,
            "screen": [screen[0], screen[1]] if screen is not None else None,
            "mode": mode,
            "region": region,
        }

    def _calibration_updates(self, seq, det, centroid) -> list[dict]:
        assert self._cal_session is not None
        before = self._cal_session.current_corner
        progress = self._cal_session.feed(det)
        updates = [self._frame_result(seq, det, centroid, None, mode="Calibrating")]
        updates.append(
            {
                "type": "calibration",
                "corner": progress.corner,
                "samples": progress.samples,
                "done": progress.done,
            }
        )
        if progress.failed:
            updates.append(_info(f"Calibration failed: {progress.reason}; starting over"))
            updates.append(_info(_CORNER_PROMPTS[0]))
        elif progress.done:
            self.calibration = self._cal_session.result
            self._cal_session = None
            self.phase = PHASE_RUNNING
            self._frame = 0
            cfg = self._controller_cfg or ControllerConfig(screen_w=self.scene.screen_w, screen_h=self.scene.screen_h)
            self.controller = Controller(cfg)
            updates.append(_info("Calibration complete"))
            updates.append(_info(self.controller.info_text))
        elif progress.corner != before:
            updates.append(_info(_CORNER_PROMPTS[progress.corner]))
        return updates


def create_app() -> FastAPI:
    """HTTP app: health probe plus the full-duplex session endpoint."""
    app = FastAPI(title="laps session server")

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        session = Session()
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    await ws.send_text(json.dumps(_error("invalid JSON")))
                    continue
                for update in session.step(msg):
                    await ws.send_text(json.dumps(update))
        except WebSocketDisconnect:
            return

    return app
