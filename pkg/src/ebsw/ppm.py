"""Minimal binary PPM (P6, maxval 255) reader and writer."""

from __future__ import annotations

import numpy as np

from .errors import PpmFormatError


def _read_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comment lines between header fields
    while pos < len(buf):
        c = buf[pos : pos + 1]
        if c == b"#":
            while pos < len(buf) and buf[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < len(buf) and not buf[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PpmFormatError("truncated PPM header")
    return buf[start:pos], pos


def read_ppm(path) -> np.ndarray:
    """Read a P6 image into a (H, W, 3) uint8 array."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, pos = _read_token(buf, 0)
    if magic != b"P6":
        raise PpmFormatError(f"{path}: expected magic P6, got {magic!r}")
    fields = []
    for _ in range(3):
        tok, pos = _read_token(buf, pos)
        try:
            fields.append(int(tok))
        except ValueError as exc:
            raise PpmFormatError(f"{path}: bad header token {tok!r}") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PpmFormatError(f"{path}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise PpmFormatError(f"{path}: only maxval 255 supported, got {maxval}")
    pos += 1  # single whitespace byte after the header
    need = width * height * 3
    data = buf[pos : pos + need]
    if len(data) != need:
        raise PpmFormatError(f"{path}: expected {need} pixel bytes, got {len(data)}")
    return np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3).copy()


def write_ppm(path, img: np.ndarray) -> None:
    """Write a (H, W, 3) uint8 array as a P6 image."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError("image must be a (H, W, 3) uint8 array")
    height, width = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
