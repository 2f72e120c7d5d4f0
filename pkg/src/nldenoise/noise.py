"""Seeded, reproducible image corruption: Gaussian, speckle, salt & pepper.

All parameters live on the normalized [0, 1] intensity scale: Gaussian
``param`` is the variance of additive noise, speckle ``param`` the variance
of the zero-mean multiplicative term, salt & pepper ``param`` the corruption
density. Samples are drawn in flat row-major channel-interleaved order, one
fixed-size batch per operation, so output bytes are a pure function of
(image, parameters, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import Image, quantize

NOISE_KINDS = ("gaussian", "speckle", "salt_pepper")

_SHORT = {"gaussian": "gaussian", "speckle": "speckle", "salt_pepper": "sp"}
_PARSE = {"gaussian": "gaussian", "speckle": "speckle", "sp": "salt_pepper", "salt_pepper": "salt_pepper"}

_U64_MAX = 2**64


class RngStream:
    """Deterministic sample stream backed by the Philox 4x64 counter generator.

    The derivations are fixed here instead of delegated to library
    distribution methods: uniforms take the top 53 bits of each 64-bit
    draw, normals come from the Box-Muller transform on uniform pairs.
    A seed therefore pins the exact sample sequence.

    A stream is single-owner mutable state; do not share one across
    concurrent tasks.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < _U64_MAX:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._bits = np.random.Philox(key=seed)

    def raw(self, n: int) -> np.ndarray:
        """Next n raw 64-bit draws."""
        if n == 0:
            return np.empty(0, dtype=np.uint64)
        return np.asarray(self._bits.random_raw(n), dtype=np.uint64)

    def uniform01(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, low: float, high: float, n: int) -> np.ndarray:
        """n doubles uniform on [low, high)."""
        return low + (high - low) * self.uniform01(n)

    def normal(self, n: int) -> np.ndarray:
        """n standard normal doubles via Box-Muller.

        Consumes ceil(n/2) draws for u1 in (0, 1], then the same number for
        u2 in [0, 1); returns the cosine branch followed by the sine branch,
        truncated to n.
        """
        m = (n + 1) // 2
        u1 = ((self.raw(m) >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (self.raw(m) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        ang = (2.0 * math.pi) * u2
        return np.concatenate([r * np.cos(ang), r * np.sin(ang)])[:n]


@dataclass(frozen=True)
class NoiseSpec:
    """Tagged noise model. String form is ``kind:param[:seed]`` with kind
    one of ``gaussian``, ``speckle``, ``sp``."""

    kind: str
    param: float
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}, expected one of {NOISE_KINDS}")
        p = float(self.param)
        if self.kind == "salt_pepper":
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"salt_pepper density must be in [0, 1], got {p}")
        elif p < 0.0:
            raise ValueError(f"{self.kind} variance must be >= 0, got {p}")
        object.__setattr__(self, "param", p)
        if self.seed is not None:
            s = int(self.seed)
            if not 0 <= s < _U64_MAX:
                raise ValueError(f"seed must be a 64-bit unsigned integer, got {s}")
            object.__setattr__(self, "seed", s)

    @classmethod
    def parse(cls, text: str) -> "NoiseSpec":
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"noise spec must be kind:param[:seed], got {text!r}")
        kind = _PARSE.get(parts[0])
        if kind is None:
            raise ValueError(f"unknown noise kind {parts[0]!r} in {text!r}")
        try:
            param = float(parts[1])
        except ValueError:
            raise ValueError(f"bad noise parameter {parts[1]!r} in {text!r}") from None
        seed = None
        if len(parts) == 3:
            try:
                seed = int(parts[2])
            except ValueError:
                raise ValueError(f"bad noise seed {parts[2]!r} in {text!r}") from None
        return cls(kind, param, seed)

    def canonical(self) -> str:
        base = f"{_SHORT[self.kind]}:{self.param:g}"
        return base if self.seed is None else f"{base}:{self.seed}"


def add_gaussian(img: Image, variance: float, rng: RngStream) -> Image:
    """Additive zero-mean Gaussian noise of the given variance per sample."""
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    s = img.pixels.astype(np.float64)
    z = rng.normal(s.size).reshape(s.shape)
    return Image(quantize(255.0 * (s / 255.0 + math.sqrt(variance) * z)))


def add_speckle(img: Image, variance: float, rng: RngStream) -> Image:
    """Multiplicative noise: s' = s + s*u with u ~ Uniform(-a, a), Var(u) = variance."""
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    a = math.sqrt(3.0 * variance)
    s = img.pixels.astype(np.float64)
    u = rng.uniform(-a, a, s.size).reshape(s.shape)
    v = s / 255.0
    return Image(quantize(255.0 * (v + v * u)))


def add_salt_pepper(img: Image, density: float, rng: RngStream, per_channel: bool = False) -> Image:
    """Impulse noise: each pixel corrupted to 0 or 255 with the given density.

    Default corrupts whole pixels (all channels get the same extreme).
    per_channel=True corrupts individual samples independently instead.
    Draw order: all corruption decisions first, then all value picks.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    out = img.pixels.copy()
    if per_channel:
        n = out.size
        corrupt = rng.uniform01(n) < density
        values = np.where(rng.uniform01(n) < 0.5, 0, 255).astype(np.uint8)
        flat = out.reshape(-1)
        flat[corrupt] = values[corrupt]
    else:
        n = img.height * img.width
        corrupt = (rng.uniform01(n) < density).reshape(img.height, img.width)
        values = np.where(rng.uniform01(n) < 0.5, 0, 255).astype(np.uint8)
        values = values.reshape(img.height, img.width)
        out[corrupt] = values[corrupt][:, None]
    return Image(out)


def apply_noise(img: Image, spec: NoiseSpec, rng: RngStream | None = None, per_channel: bool = False) -> Image:
    """Corrupt per the spec; the stream defaults to one seeded from spec.seed."""
    if rng is None:
        if spec.seed is None:
            raise ValueError(f"noise spec {spec.canonical()!r} has no seed and no stream was given")
        rng = RngStream(spec.seed)
    if spec.kind == "gaussian":
        return add_gaussian(img, spec.param, rng)
    if spec.kind == "speckle":
        return add_speckle(img, spec.param, rng)
    return add_salt_pepper(img, spec.param, rng, per_channel=per_channel)
