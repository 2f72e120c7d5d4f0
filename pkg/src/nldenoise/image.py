"""8-bit image container, sliding-window extraction, and write-back quantization.

Pixel data lives in a read-only ``(height, width, channels)`` uint8 array,
C-contiguous so the flat view is row-major and channel-interleaved. All
filter and noise math runs in float64; :func:`quantize` is the single rule
for going back to 8 bits (round half up, then clamp to [0, 255]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BORDER_MODES = ("replicate", "reflect", "zero")


@dataclass(frozen=True)
class Image:
    """Immutable 8-bit raster; ``pixels`` has shape (height, width, channels).

    channels is 1 (grayscale) or 3 (RGB). The array is copied on
    construction and marked read-only, so an Image can be shared freely
    across threads.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {px.dtype}")
        if px.ndim != 3:
            raise ValueError(f"pixels must be (height, width, channels), got shape {px.shape}")
        h, w, c = px.shape
        if h < 1 or w < 1:
            raise ValueError(f"image dimensions must be positive, got {w}x{h}")
        if c not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {c}")
        px = px.copy(order="C")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def data(self) -> np.ndarray:
        """Flat row-major, channel-interleaved sample view."""
        return self.pixels.reshape(-1)

    @classmethod
    def from_flat(cls, width: int, height: int, channels: int, data) -> "Image":
        """Build an Image from flat row-major channel-interleaved samples."""
        if isinstance(data, (bytes, bytearray, memoryview)):
            arr = np.frombuffer(data, dtype=np.uint8)
        else:
            arr = np.asarray(data)
            if arr.dtype != np.uint8:
                if not np.issubdtype(arr.dtype, np.integer):
                    raise ValueError(f"samples must be integers, got dtype {arr.dtype}")
                if arr.size and (arr.min() < 0 or arr.max() > 255):
                    raise ValueError("samples must lie in [0, 255]")
                arr = arr.astype(np.uint8)
        expected = width * height * channels
        if arr.size != expected:
            raise ValueError(f"expected {expected} samples for {width}x{height}x{channels}, got {arr.size}")
        return cls(arr.reshape(height, width, channels))


@dataclass(frozen=True)
class Window:
    """Ordered mask contents, row-major: (n, channels) float64.

    Windows built by extract_window have n = k*k for odd k; the kernels
    accept any nonempty pixel list. center_index is pinned to (n-1)//2,
    the mask's middle position.
    """

    pixels: np.ndarray
    center_index: int

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1:
            raise ValueError(f"window pixels must be (n, channels), got shape {px.shape}")
        n = px.shape[0]
        if self.center_index != (n - 1) // 2:
            raise ValueError(f"center_index must be {(n - 1) // 2} for n={n}, got {self.center_index}")
        px = px.copy(order="C")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def size(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[1]

    @property
    def center(self) -> np.ndarray:
        return self.pixels[self.center_index].copy()


def _resolve(i: int, n: int, mode: str) -> int:
    """Map a possibly out-of-range coordinate to a source index, or -1 for zero fill."""
    if 0 <= i < n:
        return i
    if mode == "replicate":
        return 0 if i < 0 else n - 1
    if mode == "reflect":
        if n == 1:
            return 0
        period = 2 * n - 2
        m = i % period
        return m if m < n else period - m
    return -1


def check_border(mode: str) -> str:
    if mode not in BORDER_MODES:
        raise ValueError(f"unknown border mode {mode!r}, expected one of {BORDER_MODES}")
    return mode


def check_mask(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise ValueError(f"mask side must be an odd integer >= 1, got {k!r}")
    return int(k)


def extract_window(img: Image, x: int, y: int, k: int, border: str = "replicate") -> Window:
    """Extract the k x k window centered on (x, y) with the given border policy.

    Out-of-range coordinates clamp to the nearest edge (replicate), mirror
    without repeating the edge sample (reflect), or read as zero pixels
    (zero).
    """
    check_mask(k)
    check_border(border)
    if not (0 <= x < img.width and 0 <= y < img.height):
        raise ValueError(f"({x}, {y}) outside {img.width}x{img.height} image")
    half = k // 2
    c = img.channels
    buf = np.zeros((k * k, c), dtype=np.float64)
    i = 0
    for dy in range(-half, half + 1):
        sy = _resolve(y + dy, img.height, border)
        for dx in range(-half, half + 1):
            sx = _resolve(x + dx, img.width, border)
            if sy >= 0 and sx >= 0:
                buf[i] = img.pixels[sy, sx]
            i += 1
    return Window(buf, (k * k - 1) // 2)


def padded_f64(img: Image, half: int, border: str) -> np.ndarray:
    """Image as float64, padded by ``half`` on each side per the border policy.

    Uses the same coordinate mapping as extract_window, so whole-image
    engines and per-window extraction always see identical pixels.
    """
    check_border(border)
    arr = img.pixels.astype(np.float64)
    if half == 0:
        return arr
    h, w, c = arr.shape
    if border == "zero":
        out = np.zeros((h + 2 * half, w + 2 * half, c), dtype=np.float64)
        out[half:half + h, half:half + w] = arr
        return out
    rows = np.array([_resolve(i, h, border) for i in range(-half, h + half)])
    cols = np.array([_resolve(i, w, border) for i in range(-half, w + half)])
    return arr[np.ix_(rows, cols)]


def quantize(values) -> np.ndarray:
    """Round half up, clamp to [0, 255], return uint8."""
    v = np.floor(np.asarray(values, dtype=np.float64) + 0.5)
    return np.clip(v, 0.0, 255.0).astype(np.uint8)
