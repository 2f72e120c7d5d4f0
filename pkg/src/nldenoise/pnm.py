"""Binary PGM (P5) and PPM (P6) codec, maxval 255 only.

The decoder accepts any legal header whitespace and ``#`` comments. The
encoder always emits the canonical header — magic, newline, ``width height``
separated by a single space, newline, ``255``, newline — so encoded output
is byte-reproducible. Decode errors report the byte offset at which parsing
failed.
"""

from __future__ import annotations

import numpy as np

from .image import Image

_WHITESPACE = b" \t\n\r\x0b\x0c"


class PnmError(ValueError):
    """Malformed PNM input; ``offset`` is the failing byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _next_token(data: bytes, pos: int) -> tuple[bytes, int, int]:
    n = len(data)
    while pos < n:
        b = data[pos]
        if b in _WHITESPACE:
            pos += 1
        elif b == 0x23:  # '#'
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise PnmError("unexpected end of header", pos)
    start = pos
    while pos < n and data[pos] not in _WHITESPACE:
        pos += 1
    return data[start:pos], start, pos


def _header_int(data: bytes, pos: int, what: str) -> tuple[int, int, int]:
    token, start, pos = _next_token(data, pos)
    if not token.isdigit():
        raise PnmError(f"malformed {what} {token[:20]!r}", start)
    return int(token), start, pos


def decode_pnm(data: bytes) -> Image:
    """Decode binary PGM/PPM bytes into an Image."""
    if len(data) < 2 or data[0:1] != b"P" or data[1:2] not in (b"5", b"6"):
        raise PnmError("not a binary PGM/PPM (magic must be P5 or P6)", 0)
    channels = 1 if data[1:2] == b"5" else 3
    pos = 2
    if pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        raise PnmError("magic not followed by whitespace", pos)
    width, at, pos = _header_int(data, pos, "width")
    if width < 1:
        raise PnmError(f"invalid width {width}", at)
    height, at, pos = _header_int(data, pos, "height")
    if height < 1:
        raise PnmError(f"invalid height {height}", at)
    maxval, at, pos = _header_int(data, pos, "maxval")
    if maxval != 255:
        raise PnmError(f"unsupported maxval {maxval} (only 255)", at)
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise PnmError("missing whitespace after maxval", pos)
    pos += 1
    need = width * height * channels
    avail = len(data) - pos
    if avail < need:
        raise PnmError(f"truncated payload: need {need} sample bytes, have {avail}", len(data))
    samples = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return Image(samples.reshape(height, width, channels))


def encode_pnm(img: Image) -> bytes:
    """Encode an Image as canonical binary PGM/PPM bytes."""
    magic = "P5" if img.channels == 1 else "P6"
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def read_pnm(path) -> Image:
    with open(path, "rb") as fh:
        return decode_pnm(fh.read())


def write_pnm(path, img: Image) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pnm(img))
