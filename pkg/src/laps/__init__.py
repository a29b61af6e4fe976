"""Hardware-free laser-pointer presentation control.

A camera watches the projected screen through a red filter; the blue
plane isolates the laser spot, a four-corner calibration maps camera
coordinates onto the screen, and a gesture state machine turns timed
spot movements into slide and mouse commands.  Everything runs against a
synthetic camera, so the full pipeline is testable without hardware.
"""

from .calib import (
    Calibration,
    CalibrationError,
    CalibrationSession,
    DegenerateQuadError,
    Homography,
    PointAtInfinityError,
    feed_calibration,
    in_roi,
    map_point,
    screen_corners,
    solve_homography,
)
from .control import (
    CommandEvent,
    Controller,
    ControllerConfig,
    EventKind,
    Mode,
    Region,
    classify_region,
)
from .imaging import DirectorySource, Frame, FrameFormatError, FrameSource, load_frame, save_frame
from .metrics import MetricsReport, Trace, TraceFrame, accuracy, latency, reliability
from .simcam import (
    BackgroundSpec,
    GroundTruth,
    Renderer,
    Scenario,
    SceneConfig,
    ScenarioError,
    ScenarioResult,
    compare_expected,
    load_scenario,
    make_background,
    run_scenario,
    save_scenario,
)
from .spot import DetectorConfig, SpotDetection, detect, threshold_histogram

__version__ = "0.1.0"

__all__ = [
    "BackgroundSpec",
    "Calibration",
    "CalibrationError",
    "CalibrationSession",
    "CommandEvent",
    "Controller",
    "ControllerConfig",
    "DegenerateQuadError",
    "DetectorConfig",
    "DirectorySource",
    "EventKind",
    "Frame",
    "FrameFormatError",
    "FrameSource",
    "GroundTruth",
    "Homography",
    "MetricsReport",
    "Mode",
    "PointAtInfinityError",
    "Region",
    "Renderer",
    "Scenario",
    "ScenarioError",
    "ScenarioResult",
    "SceneConfig",
    "SpotDetection",
    "Trace",
    "TraceFrame",
    "accuracy",
    "classify_region",
    "compare_expected",
    "detect",
    "feed_calibration",
    "in_roi",
    "latency",
    "load_frame",
    "load_scenario",
    "make_background",
    "map_point",
    "reliability",
    "run_scenario",
    "save_frame",
    "save_scenario",
    "screen_corners",
    "solve_homography",
    "threshold_histogram",
    "__version__",
]
