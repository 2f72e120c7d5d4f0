"""Pure-numpy whole-image filter engines (fallback path).

Vectorizes across pixels while keeping every per-pixel accumulation in the
same ascending window-index / channel order as the numba engines and the
window kernels, so the two backends produce bit-identical images.
"""

from __future__ import annotations

import numpy as np

from .image import quantize


def _planes(padded: np.ndarray, h: int, w: int, k: int) -> list[np.ndarray]:
    """The n = k*k shifted (h, w, c) views of the padded image, mask row-major."""
    return [padded[dy:dy + h, dx:dx + w] for dy in range(k) for dx in range(k)]


def _sqmags(planes: list[np.ndarray], c: int) -> list[np.ndarray]:
    out = []
    for p in planes:
        s = p[..., 0] * p[..., 0]
        for ch in range(1, c):
            s = s + p[..., ch] * p[..., ch]
        out.append(s)
    return out


def _pair_dist(pj: np.ndarray, pi: np.ndarray, c: int) -> np.ndarray:
    d = pj[..., 0] - pi[..., 0]
    d2 = d * d
    for ch in range(1, c):
        d = pj[..., ch] - pi[..., ch]
        d2 = d2 + d * d
    return np.sqrt(d2)


def _mean(planes, n, c):
    acc = np.zeros(planes[0].shape)
    for p in planes:
        acc = acc + p
    return acc / n


def _median(planes, n, c):
    mags = _sqmags(planes, c)
    target = n // 2
    out = np.zeros(planes[0].shape)
    for j in range(n):
        rank = np.zeros(mags[0].shape, np.int64)
        for i in range(n):
            if i < j:
                rank += mags[i] <= mags[j]
            elif i > j:
                rank += mags[i] < mags[j]
        hit = rank == target
        out = np.where(hit[..., None], planes[j], out)
    return out


def _cmf(planes, n, c):
    out = np.empty(planes[0].shape)
    for ch in range(c):
        stack = np.stack([p[..., ch] for p in planes], axis=-1)
        stack.sort(axis=-1)
        out[..., ch] = stack[..., n // 2]
    return out


def _vmf(planes, n, c):
    best_cost = None
    out = None
    for j in range(n):
        cost = np.zeros(planes[0].shape[:2])
        for i in range(n):
            cost += _pair_dist(planes[j], planes[i], c)
        if best_cost is None:
            best_cost = cost
            out = planes[j].astype(np.float64)
        else:
            better = cost < best_cost
            best_cost = np.where(better, cost, best_cost)
            out = np.where(better[..., None], planes[j], out)
    return out


def _depths(planes, n, c):
    depths = []
    for j in range(n):
        accs = [np.zeros(planes[0].shape[:2]) for _ in range(c)]
        for i in range(n):
            diffs = [planes[j][..., ch] - planes[i][..., ch] for ch in range(c)]
            d2 = diffs[0] * diffs[0]
            for ch in range(1, c):
                d2 = d2 + diffs[ch] * diffs[ch]
            d = np.sqrt(d2)
            nz = d != 0.0
            safe = np.where(nz, d, 1.0)
            for ch in range(c):
                accs[ch] += np.where(nz, diffs[ch] / safe, 0.0)
        s = accs[0] * accs[0]
        for ch in range(1, c):
            s = s + accs[ch] * accs[ch]
        dep = 1.0 - np.sqrt(s) / (n - 1)
        np.clip(dep, 0.0, 1.0, out=dep)
        depths.append(dep)
    return depths


def _argmax_pixels(planes, depths, n):
    best_depth = depths[0].copy()
    out = planes[0].astype(np.float64)
    for j in range(1, n):
        better = depths[j] > best_depth
        best_depth = np.where(better, depths[j], best_depth)
        out = np.where(better[..., None], planes[j], out)
    return out


def _smf(planes, n, c):
    return _argmax_pixels(planes, _depths(planes, n, c), n)


def _msmf(planes, n, c, t):
    depths = _depths(planes, n, c)
    ci = n // 2
    rank = np.ones(depths[0].shape, np.int64)
    for i in range(n):
        if i == ci:
            continue
        if i < ci:
            rank += depths[i] >= depths[ci]
        else:
            rank += depths[i] > depths[ci]
    keep = rank <= t
    return np.where(keep[..., None], planes[ci], _argmax_pixels(planes, depths, n))


def run(kind: str, t: int | None, padded: np.ndarray, h: int, w: int, c: int, k: int) -> np.ndarray:
    planes = _planes(padded, h, w, k)
    n = k * k
    if kind == "mean":
        values = _mean(planes, n, c)
    elif kind == "median":
        values = _median(planes, n, c)
    elif kind == "cmf":
        values = _cmf(planes, n, c)
    elif kind == "vmf":
        values = _vmf(planes, n, c)
    elif kind == "smf":
        values = _smf(planes, n, c)
    elif kind == "msmf":
        values = _msmf(planes, n, c, t)
    else:
        raise ValueError(f"unknown filter kind {kind!r}")
    return quantize(values)
