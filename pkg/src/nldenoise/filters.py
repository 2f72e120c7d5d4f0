"""Six sliding-window filter kernels and the engine that applies them.

Kernels operate on a Window and are pure. mean and cmf may synthesize new
pixel values; median, vmf, smf, and msmf always return one of the window's
own pixels. Every tie (magnitude, distance sum, depth) breaks toward the
lowest window index, and accumulations run in ascending window-index and
channel order, so results are deterministic and bit-identical across the
numba and numpy engines.

apply_filter dispatches to a numba-jitted engine when available; set
NLDENOISE_BACKEND=numpy to force the pure-numpy fallback (or =numba to
require the jit path).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .image import Image, Window, check_border, check_mask, padded_f64

FILTER_KINDS = ("mean", "median", "cmf", "vmf", "smf", "msmf")
DEFAULT_MSMF_T = 4
BACKEND_ENV = "NLDENOISE_BACKEND"


@dataclass(frozen=True)
class FilterId:
    """A filter selection; msmf carries its keep-threshold t."""

    kind: str
    t: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter {self.kind!r}, expected one of {FILTER_KINDS}")
        if self.kind == "msmf":
            if self.t is None:
                raise ValueError("msmf needs a threshold t")
            t = int(self.t)
            if t < 1:
                raise ValueError(f"msmf threshold must be >= 1, got {t}")
            object.__setattr__(self, "t", t)
        elif self.t is not None:
            raise ValueError(f"{self.kind} takes no threshold")

    @classmethod
    def parse(cls, text: str) -> "FilterId":
        """Parse ``mean|median|cmf|vmf|smf|msmf[:T]``; bare msmf gets T=4."""
        if ":" in text:
            kind, _, raw = text.partition(":")
            if kind != "msmf":
                raise ValueError(f"only msmf takes a :T suffix, got {text!r}")
            try:
                t = int(raw)
            except ValueError:
                raise ValueError(f"bad msmf threshold {raw!r} in {text!r}") from None
            return cls("msmf", t)
        if text == "msmf":
            return cls("msmf", DEFAULT_MSMF_T)
        return cls(text)

    def canonical(self) -> str:
        return f"msmf:{self.t}" if self.kind == "msmf" else self.kind


@dataclass(frozen=True)
class DepthRanking:
    """Window indices sorted by spatial depth, deepest first.

    depths[order[i]] is non-increasing in i; equal depths keep ascending
    index order. center_rank is the 1-based position of the window's
    center pixel in that order.
    """

    order: np.ndarray
    depths: np.ndarray
    center_rank: int


def mean(w: Window) -> np.ndarray:
    """Component-wise arithmetic mean of the window (real-valued)."""
    px = w.pixels
    acc = np.zeros(px.shape[1])
    for i in range(px.shape[0]):
        acc = acc + px[i]
    return acc / px.shape[0]


def _sqmag(px: np.ndarray, j: int, c: int) -> float:
    s = 0.0
    for ch in range(c):
        v = px[j, ch]
        s += v * v
    return s


def median(w: Window) -> np.ndarray:
    """The window pixel whose squared magnitude is the lower median.

    Lower median = element n//2 of the 0-indexed magnitude-sorted order;
    equal magnitudes keep ascending window index.
    """
    px = w.pixels
    n, c = px.shape
    mags = [_sqmag(px, j, c) for j in range(n)]
    target = n // 2
    for j in range(n):
        r = 0
        for i in range(n):
            if mags[i] < mags[j] or (mags[i] == mags[j] and i < j):
                r += 1
        if r == target:
            return px[j].copy()
    raise AssertionError("unreachable: ranks are a permutation")


def cmf(w: Window) -> np.ndarray:
    """Per-channel scalar lower median, assembled into one (possibly new) pixel."""
    px = w.pixels
    n, c = px.shape
    out = np.empty(c)
    for ch in range(c):
        out[ch] = np.sort(px[:, ch])[n // 2]
    return out


def _dist(px: np.ndarray, j: int, i: int, c: int) -> float:
    d2 = 0.0
    for ch in range(c):
        t = px[j, ch] - px[i, ch]
        d2 += t * t
    return math.sqrt(d2)


def vmf(w: Window) -> np.ndarray:
    """The window pixel minimizing the sum of L2 distances to all window pixels."""
    px = w.pixels
    n, c = px.shape
    best = -1
    best_cost = 0.0
    for j in range(n):
        cost = 0.0
        for i in range(n):
            cost += _dist(px, j, i, c)
        if best < 0 or cost < best_cost:
            best = j
            best_cost = cost
    return px[best].copy()


def spatial_depth(x, w: Window) -> float:
    """Spatial depth of x within the window: 1 - ||sum of unit vectors||/(n-1).

    Unit vectors point from the window pixels toward x; zero-distance terms
    are skipped. For a member point the result lies in [0, 1] (clamped
    against float round-off).
    """
    px = w.pixels
    n, c = px.shape
    if n < 2:
        raise ValueError("spatial depth needs a window of at least 2 pixels")
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (c,):
        raise ValueError(f"point must have {c} components, got shape {xv.shape}")
    acc = [0.0] * c
    for i in range(n):
        d2 = 0.0
        for ch in range(c):
            t = xv[ch] - px[i, ch]
            d2 += t * t
        d = math.sqrt(d2)
        if d != 0.0:
            for ch in range(c):
                acc[ch] += (xv[ch] - px[i, ch]) / d
    s = 0.0
    for ch in range(c):
        s += acc[ch] * acc[ch]
    dep = 1.0 - math.sqrt(s) / (n - 1)
    if dep < 0.0:
        return 0.0
    if dep > 1.0:
        return 1.0
    return dep


def _all_depths(w: Window) -> list[float]:
    return [spatial_depth(w.pixels[j], w) for j in range(w.size)]


def smf(w: Window) -> np.ndarray:
    """The maximum-depth window pixel (depth ties keep the lowest index)."""
    depths = _all_depths(w)
    best = 0
    for j in range(1, len(depths)):
        if depths[j] > depths[best]:
            best = j
    return w.pixels[best].copy()


def depth_ranking(w: Window) -> DepthRanking:
    """All window depths plus the depth-descending index order."""
    depths = _all_depths(w)
    order = sorted(range(len(depths)), key=lambda j: (-depths[j], j))
    center_rank = order.index(w.center_index) + 1
    return DepthRanking(
        order=np.asarray(order, dtype=np.int64),
        depths=np.asarray(depths, dtype=np.float64),
        center_rank=center_rank,
    )


def msmf(t: int, w: Window) -> np.ndarray:
    """Keep the center pixel if its depth rank is within t, else take the deepest.

    The keep branch returns the original center pixel unchanged.
    """
    n = w.size
    t = int(t)
    if not 1 <= t <= n:
        raise ValueError(f"msmf threshold must be in [1, {n}], got {t}")
    depths = _all_depths(w)
    ci = w.center_index
    rank = 1
    for i in range(n):
        if i == ci:
            continue
        if depths[i] > depths[ci] or (depths[i] == depths[ci] and i < ci):
            rank += 1
    if rank <= t:
        return w.pixels[ci].copy()
    best = 0
    for j in range(1, n):
        if depths[j] > depths[best]:
            best = j
    return w.pixels[best].copy()


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def backend_name() -> str:
    """Active engine: 'numba' unless unavailable or NLDENOISE_BACKEND says 'numpy'."""
    env = os.environ.get(BACKEND_ENV)
    if env is None:
        return "numba" if _numba_available() else "numpy"
    if env not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {env!r}")
    return env


def _engine(name: str):
    if name == "numba":
        from . import _engine_nb
        return _engine_nb
    from . import _engine_np
    return _engine_np


def apply_filter(img: Image, f: FilterId, k: int = 3, border: str = "replicate") -> Image:
    """Apply filter f over every pixel with a k x k mask and border policy.

    Each output pixel is the kernel of the original image's window,
    quantized back to 8 bits; already-filtered values never feed later
    windows. k=1 is the identity for every filter.
    """
    check_mask(k)
    check_border(border)
    if not isinstance(f, FilterId):
        raise ValueError(f"expected a FilterId, got {f!r}")
    n = k * k
    if f.kind == "msmf" and f.t > n:
        raise ValueError(f"msmf threshold {f.t} exceeds window size {n}")
    if k == 1:
        return Image(img.pixels)
    padded = padded_f64(img, k // 2, border)
    out = _engine(backend_name()).run(f.kind, f.t, padded, img.height, img.width, img.channels, k)
    return Image(out)
