"""Laser-spot detection by thresholding the blue plane.

Only the blue plane is read: under the camera's red filter the spot is the
one region whose blue intensity clears the threshold, while red and green
carry too much background to separate it.  The spot position is the
unweighted mean of the above-threshold pixel coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .imaging import Frame

DEFAULT_THRESHOLD = 200
DEFAULT_MIN_PIXELS = 1
DEFAULT_MAX_PIXELS = 400

HIST_BIN_WIDTH = 5
HIST_BINS = 52  # width-5 bins over [0, 255]; 255 falls in the last bin


@dataclass(frozen=True)
class DetectorConfig:
    """Static threshold detector settings.

    ``threshold`` is compared strictly (intensity must exceed it).
    ``max_pixels`` rejects washed-out frames as "no spot" rather than
    reporting a meaningless centroid.  The threshold is a config field so a
    future adaptive scheme can retune it per frame; nothing adapts here.
    """

    threshold: int = DEFAULT_THRESHOLD
    min_pixels: int = DEFAULT_MIN_PIXELS
    max_pixels: int = DEFAULT_MAX_PIXELS

    def __post_init__(self) -> None:
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must be in [0, 255]")
        if self.min_pixels < 1:
            raise ValueError("min_pixels must be >= 1")
        if self.min_pixels > self.max_pixels:
            raise ValueError("min_pixels must not exceed max_pixels")


@dataclass(frozen=True)
class SpotDetection:
    """Centroid and extent of the above-threshold blue region.

    ``x``/``y`` are sub-pixel camera coordinates (column, row); ``bbox`` is
    (min_x, min_y, max_x, max_y) over the contributing pixels.
    """

    x: float
    y: float
    n: int
    bbox: tuple[int, int, int, int]

    @property
    def centroid(self) -> tuple[float, float]:
        return (self.x, self.y)


def detect(frame: Frame, cfg: DetectorConfig | None = None) -> SpotDetection | None:
    """Find the laser spot in a frame, or None when no acceptable spot exists.

    Absence is a value, not an error: it covers both "nothing bright
    enough" and "too many bright pixels to be a spot".
    """
    cfg = cfg or DetectorConfig()
    mask = frame.blue > cfg.threshold
    n = int(np.count_nonzero(mask))
    if n < cfg.min_pixels or n > cfg.max_pixels:
        return None
    rows, cols = np.nonzero(mask)
    return SpotDetection(
        x=float(cols.mean()),
        y=float(rows.mean()),
        n=n,
        bbox=(int(cols.min()), int(rows.min()), int(cols.max()), int(rows.max())),
    )


def threshold_histogram(
    samples: Iterable[tuple[Frame, Sequence[tuple[int, int]]]],
) -> np.ndarray:
    """Histogram of per-frame minimum blue intensity inside the true spot region.

    ``samples`` pairs each frame with its ground-truth spot region, a
    non-empty sequence of (x, y) pixels (synthetic-camera metadata).  Bins
    are HIST_BIN_WIDTH wide over [0, 255]; the result shows where a static
    detection threshold can safely sit.
    """
    hist = np.zeros(HIST_BINS, dtype=np.int64)
    for frame, region in samples:
        if region is None or len(region) == 0:
            raise ValueError("frame lacks a ground-truth spot region")
        lowest = min(int(frame.blue[y, x]) for x, y in region)
        hist[lowest // HIST_BIN_WIDTH] += 1
    return hist
