"""Image-pair fidelity metrics: MSE and peak signal-to-noise ratio.

PSNR uses peak 256 by default (20*log10(256/sqrt(MSE))); pass peak=255 for
the conventional definition. mse = 0 maps to infinite PSNR, reported as
math.inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import Image

PEAKS = (255, 256)


def check_peak(peak: int) -> int:
    if peak not in PEAKS:
        raise ValueError(f"peak must be 255 or 256, got {peak!r}")
    return int(peak)


def mse(a: Image, b: Image) -> float:
    """Mean squared sample error over all width*height*channels samples.

    The sum of squares is accumulated in exact integer arithmetic and
    divided once, so the result is independent of traversal order.
    """
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"image shapes differ: {a.pixels.shape} vs {b.pixels.shape}")
    d = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    total = int(np.sum(d * d))
    return total / d.size


def psnr(mse_value: float, peak: int = 256) -> float:
    """PSNR in dB for a given MSE; math.inf when mse_value is 0."""
    check_peak(peak)
    if mse_value < 0:
        raise ValueError(f"mse must be >= 0, got {mse_value}")
    if mse_value == 0:
        return math.inf
    return 20.0 * math.log10(peak / math.sqrt(mse_value))


@dataclass(frozen=True)
class Score:
    """One reference-vs-candidate measurement."""

    mse: float
    psnr: float


def score(reference: Image, candidate: Image, peak: int = 256) -> Score:
    m = mse(reference, candidate)
    return Score(mse=m, psnr=psnr(m, peak))
