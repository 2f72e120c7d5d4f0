"""Shared helpers: window construction and the seeded synthetic corpus."""

from __future__ import annotations

import math

import numpy as np
import pytest

from nldenoise import Image, Window, quantize
from nldenoise.noise import RngStream


def make_window(values) -> Window:
    """Window from a list of scalars (gray) or component tuples."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    return Window(arr, (arr.shape[0] - 1) // 2)


def random_window(rng: np.random.Generator, k: int = 3, channels: int = 3, lo: int = 0, hi: int = 8) -> Window:
    """Random window with small integer components; duplicates are common."""
    n = k * k
    return Window(rng.integers(lo, hi, size=(n, channels)).astype(np.float64), (n - 1) // 2)


def random_image(rng: np.random.Generator, height: int, width: int, channels: int) -> Image:
    return Image(rng.integers(0, 256, size=(height, width, channels), dtype=np.uint8))


def textured_image(seed: int, channels: int, side: int = 256) -> Image:
    """Seeded synthetic texture: offset base level, two sinusoid scales, grain.

    The base level sits well below the salt/pepper midpoint so impulse
    corruption is not zero-mean, as in predominantly dark imagery.
    """
    rng = RngStream(seed)
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    out = np.empty((side, side, channels))
    for ch in range(channels):
        p = rng.uniform01(7)
        base_level = 70 + 30 * p[6]
        fx1, fy1 = 2 + 10 * p[0], 2 + 10 * p[1]
        fx2 = 40 + 40 * p[2]
        base = (base_level
                + 35 * np.sin(2 * math.pi * (fx1 * xx / side + p[4])) * np.cos(2 * math.pi * (fy1 * yy / side + p[5]))
                + 20 * np.sin(2 * math.pi * (fx2 * (xx + yy) / side + p[3])))
        grain = rng.uniform(-15, 15, side * side).reshape(side, side)
        out[..., ch] = base + grain
    return Image(quantize(out))


def make_corpus(count: int = 10, side: int = 256) -> list[Image]:
    """The fixed benchmark corpus: alternating gray and RGB textures."""
    return [textured_image(1000 + i, 1 if i % 2 == 0 else 3, side) for i in range(count)]


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test under both filter engines."""
    monkeypatch.setenv("NLDENOISE_BACKEND", request.param)
    return request.param
