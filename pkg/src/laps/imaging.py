"""Frame representation and file-backed frame sources.

A frame is three 8-bit intensity planes (red, green, blue) of identical
size.  Planes are indexed ``plane[row, col]``; x is the column, y is the
row, origin at the top-left pixel.  The canonical interchange format is
binary PPM (P6, maxval 255) because it round-trips bit-exactly; 8-bit RGB
PNG is accepted for convenience.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_WIDTH = 640
DEFAULT_HEIGHT = 480
DEFAULT_FPS = 30.0

FRAME_SUFFIXES = (".ppm", ".png")


class FrameFormatError(ValueError):
    """File is not an 8-bit RGB image, or frames in a source disagree."""


def _as_plane(data, width: int, height: int) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(data, dtype=np.uint8))
    if arr.shape != (height, width):
        raise ValueError(f"plane shape {arr.shape} does not match {(height, width)}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """One captured RGB image; immutable after construction.

    Equality compares dimensions and pixel data, not ``index`` (the index
    identifies a frame within one source, not its content).
    """

    width: int
    height: int
    red: np.ndarray
    green: np.ndarray
    blue: np.ndarray
    index: int = 0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        for name in ("red", "green", "blue"):
            object.__setattr__(self, name, _as_plane(getattr(self, name), self.width, self.height))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and np.array_equal(self.red, other.red)
            and np.array_equal(self.green, other.green)
            and np.array_equal(self.blue, other.blue)
        )

    @classmethod
    def from_rgb(cls, rgb: np.ndarray, index: int = 0) -> "Frame":
        """Build a frame from an (height, width, 3) uint8 array."""
        rgb = np.asarray(rgb, dtype=np.uint8)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ValueError("expected an (h, w, 3) array")
        h, w = rgb.shape[:2]
        return cls(w, h, rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2], index=index)

    def to_rgb(self) -> np.ndarray:
        return np.dstack([self.red, self.green, self.blue])


class FrameSource:
    """Iterator of frames with constant dimensions and increasing indices.

    Single-consumer; ``nominal_fps`` is metadata only (the pipeline counts
    processed frames, never wall-clock time).
    """

    nominal_fps: float = DEFAULT_FPS

    def __iter__(self) -> "FrameSource":
        return self

    def __next__(self) -> Frame:
        raise NotImplementedError


def _read_ppm(data: bytes) -> np.ndarray:
    if data[:2] != b"P6":
        raise FrameFormatError("not a binary PPM (P6) file")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(data):
            c = data[pos : pos + 1]
            if c == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            elif c.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise FrameFormatError("truncated PPM header")
        try:
            fields.append(int(data[start:pos]))
        except ValueError as exc:
            raise FrameFormatError("malformed PPM header") from exc
    width, height, maxval = fields
    if maxval != 255:
        raise FrameFormatError(f"unsupported PPM maxval {maxval}; only 8-bit supported")
    if width <= 0 or height <= 0:
        raise FrameFormatError("PPM dimensions must be positive")
    pos += 1  # exactly one whitespace byte separates the header from the raster
    expected = width * height * 3
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise FrameFormatError("PPM raster truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


def _read_png(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as img:
        if img.mode != "RGB":
            raise FrameFormatError(f"unsupported PNG mode {img.mode!r}; need 8-bit RGB")
        return np.asarray(img, dtype=np.uint8)


def load_frame(path: str | Path, index: int = 0) -> Frame:
    """Load an 8-bit RGB frame from a P6 PPM or PNG file."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".ppm":
        rgb = _read_ppm(path.read_bytes())
    elif suffix == ".png":
        rgb = _read_png(path)
    else:
        raise FrameFormatError(f"unsupported frame format {suffix!r} (use .ppm or .png)")
    return Frame.from_rgb(rgb, index=index)


def save_frame(frame: Frame, path: str | Path) -> None:
    """Write a frame so that ``load_frame`` round-trips it bit-exactly."""
    path = Path(path)
    suffix = path.suffix.lower()
    rgb = frame.to_rgb()
    if suffix == ".ppm":
        header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
        path.write_bytes(header + rgb.tobytes())
    elif suffix == ".png":
        from PIL import Image

        Image.fromarray(rgb, mode="RGB").save(path)
    else:
        raise FrameFormatError(f"unsupported frame format {suffix!r} (use .ppm or .png)")


class DirectorySource(FrameSource):
    """Replays a directory of frames in lexicographic filename order.

    The replay convention is zero-padded names (``00000.ppm``) so that
    lexicographic order equals capture order.  Frames must share one
    resolution; a mismatch raises when the offending frame is reached.
    """

    def __init__(self, directory: str | Path, nominal_fps: float = DEFAULT_FPS):
        self.directory = Path(directory)
        paths = sorted(
            p for p in self.directory.iterdir() if p.suffix.lower() in FRAME_SUFFIXES
        )
        if not paths:
            raise FrameFormatError(f"no frames found in {self.directory}")
        self._paths = paths
        self._pos = 0
        self._dims: tuple[int, int] | None = None
        self.nominal_fps = nominal_fps

    def __len__(self) -> int:
        return len(self._paths)

    @property
    def paths(self) -> list[Path]:
        return list(self._paths)

    def __next__(self) -> Frame:
        if self._pos >= len(self._paths):
            raise StopIteration
        frame = load_frame(self._paths[self._pos], index=self._pos)
        if self._dims is None:
            self._dims = (frame.width, frame.height)
        elif (frame.width, frame.height) != self._dims:
            raise FrameFormatError(
                f"{self._paths[self._pos].name}: {frame.width}x{frame.height} "
                f"differs from {self._dims[0]}x{self._dims[1]}"
            )
        self._pos += 1
        return frame


def directory_source(directory: str | Path, nominal_fps: float = DEFAULT_FPS) -> DirectorySource:
    """Open a directory of frames as a replayable source."""
    return DirectorySource(directory, nominal_fps=nominal_fps)
