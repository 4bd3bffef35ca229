"""Raster file handling: PNG (via Pillow), binary PPM (P6) and PBM (P4).

Images are numpy float arrays of shape (H, W, 3) with channels in [0, 1]
(8-bit sources are divided by 255 on load).  Masks are boolean (H, W)
arrays; PBM stores them with 1 = foreground per the netpbm convention.
"""

from __future__ import annotations

import io
import re

import numpy as np
from PIL import Image

from .errors import ValidationError


def load_image(data: bytes) -> np.ndarray:
    """Decode PNG or binary PPM bytes into a (H, W, 3) float image."""
    if data[:2] == b"P6":
        return _decode_ppm(data)
    try:
        img = Image.open(io.BytesIO(data)).convert("RGB")
    except Exception as exc:
        raise ValidationError(f"unsupported or corrupt image data: {exc}") from exc
    return np.asarray(img, dtype=np.float64) / 255.0


def load_image_file(path) -> np.ndarray:
    with open(path, "rb") as f:
        return load_image(f.read())


def encode_png(img: np.ndarray) -> bytes:
    """Encode a float (H, W, 3) image, or a boolean mask, as PNG bytes."""
    arr = np.asarray(img)
    if arr.dtype == bool:
        arr = np.where(arr, 255, 0).astype(np.uint8)
        pil = Image.fromarray(arr, mode="L")
    else:
        arr = np.clip(np.round(arr * 255.0), 0, 255).astype(np.uint8)
        pil = Image.fromarray(arr, mode="RGB")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def save_png(img: np.ndarray, path) -> None:
    with open(path, "wb") as f:
        f.write(encode_png(img))


def _read_pnm_header(data: bytes, magic: bytes, fields: int):
    if data[:2] != magic:
        raise ValidationError(f"expected {magic.decode()} header")
    # Header tokens may be separated by whitespace and '#' comments.
    tokens = []
    pos = 2
    while len(tokens) < fields:
        m = re.match(rb"\s*(#[^\n]*\n)*\s*(\d+)", data[pos:])
        if not m:
            raise ValidationError("truncated netpbm header")
        tokens.append(int(m.group(2)))
        pos += m.end()
    return tokens, pos + 1  # single whitespace byte ends the header


def _decode_ppm(data: bytes) -> np.ndarray:
    (w, h, maxval), start = _read_pnm_header(data, b"P6", 3)
    if maxval != 255:
        raise ValidationError("only 8-bit PPM supported")
    need = w * h * 3
    raw = np.frombuffer(data[start : start + need], dtype=np.uint8)
    if raw.size != need:
        raise ValidationError("truncated PPM pixel data")
    return raw.reshape(h, w, 3).astype(np.float64) / 255.0


def encode_ppm(img: np.ndarray) -> bytes:
    arr = np.clip(np.round(np.asarray(img) * 255.0), 0, 255).astype(np.uint8)
    h, w = arr.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + arr.tobytes()


def decode_pbm(data: bytes) -> np.ndarray:
    """Read a binary PBM (P4) into a boolean mask, 1 = foreground."""
    (w, h), start = _read_pnm_header(data, b"P4", 2)
    row_bytes = (w + 7) // 8
    raw = np.frombuffer(data[start : start + row_bytes * h], dtype=np.uint8)
    if raw.size != row_bytes * h:
        raise ValidationError("truncated PBM data")
    bits = np.unpackbits(raw.reshape(h, row_bytes), axis=1)[:, :w]
    return bits.astype(bool)


def encode_pbm(mask: np.ndarray) -> bytes:
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    bits = np.packbits(mask.astype(np.uint8), axis=1)
    return b"P4\n%d %d\n" % (w, h) + bits.tobytes()


def load_mask_file(path) -> np.ndarray:
    with open(path, "rb") as f:
        return decode_pbm(f.read())


def save_mask_file(mask: np.ndarray, path) -> None:
    with open(path, "wb") as f:
        f.write(encode_pbm(mask))
