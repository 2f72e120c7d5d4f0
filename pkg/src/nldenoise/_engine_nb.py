"""Numba-jitted whole-image filter engines.

Each engine walks output pixels serially and mirrors the window kernels'
arithmetic exactly: ascending window index, ascending channel, ties to the
lowest index, floor(v + 0.5) clamp on write-back. nogil lets the bench
runner overlap cells on threads; cache=True persists compiled kernels.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _q(v):
    r = math.floor(v + 0.5)
    if r < 0.0:
        return 0.0
    if r > 255.0:
        return 255.0
    return r


@njit(**_JIT)
def _mean(padded, out, k):
    h, w, c = out.shape
    n = k * k
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                acc = 0.0
                for dy in range(k):
                    for dx in range(k):
                        acc += padded[y + dy, x + dx, ch]
                out[y, x, ch] = _q(acc / n)


@njit(**_JIT)
def _fill_window(padded, win, y, x, k, c):
    i = 0
    for dy in range(k):
        for dx in range(k):
            for ch in range(c):
                win[i, ch] = padded[y + dy, x + dx, ch]
            i += 1


@njit(**_JIT)
def _median(padded, out, k):
    h, w, c = out.shape
    n = k * k
    win = np.empty((n, c), np.float64)
    mags = np.empty(n, np.float64)
    target = n // 2
    for y in range(h):
        for x in range(w):
            _fill_window(padded, win, y, x, k, c)
            for j in range(n):
                s = 0.0
                for ch in range(c):
                    v = win[j, ch]
                    s += v * v
                mags[j] = s
            for j in range(n):
                r = 0
                for i in range(n):
                    if mags[i] < mags[j] or (mags[i] == mags[j] and i < j):
                        r += 1
                if r == target:
                    for ch in range(c):
                        out[y, x, ch] = _q(win[j, ch])
                    break


@njit(**_JIT)
def _cmf(padded, out, k):
    h, w, c = out.shape
    n = k * k
    buf = np.empty(n, np.float64)
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                i = 0
                for dy in range(k):
                    for dx in range(k):
                        buf[i] = padded[y + dy, x + dx, ch]
                        i += 1
                # insertion sort; n is tiny
                for a in range(1, n):
                    v = buf[a]
                    b = a - 1
                    while b >= 0 and buf[b] > v:
                        buf[b + 1] = buf[b]
                        b -= 1
                    buf[b + 1] = v
                out[y, x, ch] = _q(buf[n // 2])


@njit(**_JIT)
def _vmf(padded, out, k):
    h, w, c = out.shape
    n = k * k
    win = np.empty((n, c), np.float64)
    for y in range(h):
        for x in range(w):
            _fill_window(padded, win, y, x, k, c)
            best = -1
            best_cost = 0.0
            for j in range(n):
                cost = 0.0
                for i in range(n):
                    d2 = 0.0
                    for ch in range(c):
                        t = win[j, ch] - win[i, ch]
                        d2 += t * t
                    cost += math.sqrt(d2)
                if best < 0 or cost < best_cost:
                    best = j
                    best_cost = cost
            for ch in range(c):
                out[y, x, ch] = _q(win[best, ch])


@njit(**_JIT)
def _window_depths(win, depths, acc, n, c):
    for j in range(n):
        for ch in range(c):
            acc[ch] = 0.0
        for i in range(n):
            d2 = 0.0
            for ch in range(c):
                t = win[j, ch] - win[i, ch]
                d2 += t * t
            d = math.sqrt(d2)
            if d != 0.0:
                for ch in range(c):
                    acc[ch] += (win[j, ch] - win[i, ch]) / d
        s = 0.0
        for ch in range(c):
            s += acc[ch] * acc[ch]
        dep = 1.0 - math.sqrt(s) / (n - 1)
        if dep < 0.0:
            dep = 0.0
        elif dep > 1.0:
            dep = 1.0
        depths[j] = dep


@njit(**_JIT)
def _smf(padded, out, k):
    h, w, c = out.shape
    n = k * k
    win = np.empty((n, c), np.float64)
    depths = np.empty(n, np.float64)
    acc = np.empty(c, np.float64)
    for y in range(h):
        for x in range(w):
            _fill_window(padded, win, y, x, k, c)
            _window_depths(win, depths, acc, n, c)
            best = 0
            for j in range(1, n):
                if depths[j] > depths[best]:
                    best = j
            for ch in range(c):
                out[y, x, ch] = _q(win[best, ch])


@njit(**_JIT)
def _msmf(padded, out, k, t):
    h, w, c = out.shape
    n = k * k
    ci = n // 2
    win = np.empty((n, c), np.float64)
    depths = np.empty(n, np.float64)
    acc = np.empty(c, np.float64)
    for y in range(h):
        for x in range(w):
            _fill_window(padded, win, y, x, k, c)
            _window_depths(win, depths, acc, n, c)
            rank = 1
            for i in range(n):
                if i == ci:
                    continue
                if depths[i] > depths[ci] or (depths[i] == depths[ci] and i < ci):
                    rank += 1
            if rank <= t:
                sel = ci
            else:
                sel = 0
                for j in range(1, n):
                    if depths[j] > depths[sel]:
                        sel = j
            for ch in range(c):
                out[y, x, ch] = _q(win[sel, ch])


def run(kind: str, t: int | None, padded: np.ndarray, h: int, w: int, c: int, k: int) -> np.ndarray:
    out = np.empty((h, w, c), np.uint8)
    if kind == "mean":
        _mean(padded, out, k)
    elif kind == "median":
        _median(padded, out, k)
    elif kind == "cmf":
        _cmf(padded, out, k)
    elif kind == "vmf":
        _vmf(padded, out, k)
    elif kind == "smf":
        _smf(padded, out, k)
    elif kind == "msmf":
        _msmf(padded, out, k, t)
    else:
        raise ValueError(f"unknown filter kind {kind!r}")
    return out
