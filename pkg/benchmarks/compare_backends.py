#!/usr/bin/env python3
"""Compare the numba and pure-numpy filter engines: wall time and bit-equality.

Times every filter on a seeded synthetic image with both backends and
checks that the outputs match byte for byte. The numba path is warmed
(JIT compile excluded) before timing.

    python3 benchmarks/compare_backends.py --side 256 --mask 3 --repeats 3
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from nldenoise import FilterId, Image, quantize
from nldenoise import _engine_nb, _engine_np
from nldenoise.image import padded_f64

FILTERS = [FilterId.parse(s) for s in ("mean", "median", "cmf", "vmf", "smf", "msmf:4")]


def synthetic_image(side: int, channels: int) -> Image:
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    out = np.empty((side, side, channels))
    for ch in range(channels):
        out[..., ch] = (120 + 50 * np.sin(2 * math.pi * (5 + 3 * ch) * xx / side)
                        * np.cos(2 * math.pi * (7 + 2 * ch) * yy / side)
                        + 30 * np.sin(2 * math.pi * 40 * (xx + yy) / side))
    return Image(quantize(out))


def time_engine(engine, f: FilterId, padded, h, w, c, k, repeats: int) -> tuple[float, np.ndarray]:
    out = engine.run(f.kind, f.t, padded, h, w, c, k)  # warm-up / JIT
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        out = engine.run(f.kind, f.t, padded, h, w, c, k)
        best = min(best, time.perf_counter() - start)
    return best, out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--side", type=int, default=256, help="square image side (default 256)")
    parser.add_argument("--channels", type=int, default=3, choices=(1, 3))
    parser.add_argument("--mask", type=int, default=3, help="odd mask side (default 3)")
    parser.add_argument("--repeats", type=int, default=3, help="timed repeats, best-of (default 3)")
    args = parser.parse_args()

    img = synthetic_image(args.side, args.channels)
    k = args.mask
    padded = padded_f64(img, k // 2, "replicate")
    h, w, c = img.height, img.width, img.channels

    print(f"image {w}x{h}x{c}, mask {k}x{k}, best of {args.repeats}")
    print(f"{'filter':8s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}  identical")
    mismatched = []
    for f in FILTERS:
        t_nb, out_nb = time_engine(_engine_nb, f, padded, h, w, c, k, args.repeats)
        t_np, out_np = time_engine(_engine_np, f, padded, h, w, c, k, args.repeats)
        same = np.array_equal(out_nb, out_np)
        if not same:
            mismatched.append(f.canonical())
        print(f"{f.canonical():8s} {t_nb * 1e3:9.2f}ms {t_np * 1e3:9.2f}ms {t_np / t_nb:7.1f}x  {same}")
    if mismatched:
        print(f"BACKEND MISMATCH: {', '.join(mismatched)}")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
