from __future__ import annotations

import numpy as np

from laps.imaging import Frame


def frame_from_blue(blue: np.ndarray, red: np.ndarray | None = None, green: np.ndarray | None = None) -> Frame:
    """Frame with a given blue plane and zero (or given) red/green planes."""
    blue = np.asarray(blue, dtype=np.uint8)
    h, w = blue.shape
    zero = np.zeros((h, w), dtype=np.uint8)
    return Frame(
        width=w,
        height=h,
        red=zero if red is None else np.asarray(red, dtype=np.uint8),
        green=zero if green is None else np.asarray(green, dtype=np.uint8),
        blue=blue,
    )
