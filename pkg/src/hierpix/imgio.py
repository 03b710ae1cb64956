"""File I/O for images, label maps, feature tensors, attention maps and clicks.

Array conventions used across the package:

- RGB image: uint8 array of shape (H, W, 3).
- Label map: int32 array of shape (H, W), labels contiguous in [0, count).
- Feature field: float64 array of shape (H, W, d).
- Attention map: float64 array of shape (H, W), values in [0, 1].

Label maps are stored as 16-bit single-channel PNGs (label = pixel value).
Feature tensors use the HSPF binary layout: magic b"HSPF", then u32 width,
u32 height, u32 channels (little-endian), then `channels` row-major f32
planes. Attention maps are 8-bit or 16-bit single-channel PNGs rescaled by
their max sample value. Click files are JSON arrays of
{x, y, sign: "+"|"-", strength}.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

HSPF_MAGIC = b"HSPF"


class ImageFormatError(ValueError):
    """Raised when a file cannot be decoded into the expected raster form."""


@dataclass(frozen=True)
class Click:
    """One user click: image pixel position, polarity and strength > 0."""

    x: int
    y: int
    sign: int  # +1 or -1
    strength: float = 1.0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"click sign must be +1 or -1, got {self.sign}")
        if not self.strength > 0:
            raise ValueError(f"click strength must be > 0, got {self.strength}")


def load_image(path) -> np.ndarray:
    """Load an RGB image as a (H, W, 3) uint8 array.

    Raises FileNotFoundError for missing files and ImageFormatError for
    undecodable ones.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"image not found: {path}")
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            return np.asarray(rgb, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"cannot decode image: {path}") from exc


def save_image(img: np.ndarray, path) -> None:
    """Save a (H, W, 3) uint8 array as PNG."""
    arr = np.asarray(img, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got shape {arr.shape}")
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def encode_image_png(img: np.ndarray) -> bytes:
    """Encode a (H, W, 3) uint8 array as PNG bytes."""
    import io

    arr = np.asarray(img, dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_label_map(labels: np.ndarray, path) -> None:
    """Save a label map as a 16-bit single-channel PNG (label = pixel value)."""
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise ValueError(f"expected (H, W) label map, got shape {arr.shape}")
    if arr.min() < 0 or arr.max() > 0xFFFF:
        raise ValueError("labels out of 16-bit range")
    Image.fromarray(arr.astype(np.uint16)).save(path, format="PNG")


def encode_label_map_png(labels: np.ndarray) -> bytes:
    """Encode a label map as 16-bit single-channel PNG bytes."""
    import io

    arr = np.asarray(labels)
    if arr.min() < 0 or arr.max() > 0xFFFF:
        raise ValueError("labels out of 16-bit range")
    buf = io.BytesIO()
    Image.fromarray(arr.astype(np.uint16)).save(buf, format="PNG")
    return buf.getvalue()


def load_label_map(path) -> np.ndarray:
    """Load a label map PNG as (H, W) int32, validating label contiguity."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"label map not found: {path!s}")
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "I", "I;16", "I;16B", "P"):
                raise ImageFormatError(
                    f"label map must be single-channel, got mode {img.mode}: {path}"
                )
            arr = np.asarray(img, dtype=np.int32)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"cannot decode label map: {path}") from exc
    validate_label_map(arr)
    return arr


def validate_label_map(labels: np.ndarray) -> int:
    """Check labels are contiguous in [0, count) with every label present.

    Returns the region count.
    """
    arr = np.asarray(labels)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected non-empty (H, W) label map, got shape {arr.shape}")
    present = np.unique(arr)
    if present[0] < 0:
        raise ValueError("label map contains negative labels")
    count = int(present[-1]) + 1
    if len(present) != count:
        raise ValueError(
            f"labels not contiguous: {count} implied regions, {len(present)} present"
        )
    return count


def save_feature_tensor(planes: np.ndarray, path) -> None:
    """Write a (H, W, C) float array in the HSPF binary layout."""
    arr = np.asarray(planes, dtype=np.float32)
    if arr.ndim != 3:
        raise ValueError(f"expected (H, W, C) feature planes, got shape {arr.shape}")
    h, w, c = arr.shape
    with open(path, "wb") as f:
        f.write(HSPF_MAGIC)
        f.write(struct.pack("<III", w, h, c))
        # planes are stored channel-major, each plane row-major
        f.write(np.ascontiguousarray(np.moveaxis(arr, 2, 0)).tobytes())


def load_feature_tensor(path, width: int, height: int) -> np.ndarray:
    """Load HSPF deep-feature planes, checking magic, dimensions and payload.

    Returns a (height, width, channels) float64 array with finite values.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"feature tensor not found: {path}")
    data = path.read_bytes()
    if len(data) < 16 or data[:4] != HSPF_MAGIC:
        raise ImageFormatError(f"bad magic, not an HSPF file: {path}")
    w, h, c = struct.unpack("<III", data[4:16])
    if (w, h) != (width, height):
        raise ValueError(
            f"feature tensor is {w}x{h}, expected {width}x{height}: {path}"
        )
    expected = 16 + 4 * w * h * c
    if len(data) != expected:
        raise ImageFormatError(
            f"truncated HSPF payload: {len(data)} bytes, expected {expected}: {path}"
        )
    planes = np.frombuffer(data, dtype="<f4", offset=16).reshape(c, h, w)
    out = np.moveaxis(planes, 0, 2).astype(np.float64)
    if not np.isfinite(out).all():
        raise ValueError(f"feature tensor contains non-finite values: {path}")
    return out


def load_attention_map(path) -> np.ndarray:
    """Load a single-channel PNG as attention in [0, 1] (value / max value)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"attention map not found: {path}")
    try:
        with Image.open(path) as img:
            if img.mode == "L":
                scale = 255.0
            elif img.mode in ("I", "I;16", "I;16B"):
                scale = 65535.0
            else:
                raise ImageFormatError(
                    f"attention map must be 8/16-bit single-channel, got {img.mode}"
                )
            arr = np.asarray(img, dtype=np.float64) / scale
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"cannot decode attention map: {path}") from exc
    return np.clip(arr, 0.0, 1.0)


def save_attention_map(att: np.ndarray, path) -> None:
    """Save attention in [0, 1] as a 16-bit single-channel PNG."""
    arr = np.clip(np.asarray(att, dtype=np.float64), 0.0, 1.0)
    Image.fromarray(np.round(arr * 65535.0).astype(np.uint16)).save(path, format="PNG")


def encode_attention_png(att: np.ndarray) -> bytes:
    """Encode attention in [0, 1] as 16-bit single-channel PNG bytes."""
    import io

    arr = np.clip(np.asarray(att, dtype=np.float64), 0.0, 1.0)
    buf = io.BytesIO()
    Image.fromarray(np.round(arr * 65535.0).astype(np.uint16)).save(buf, format="PNG")
    return buf.getvalue()


def load_clicks(path) -> list[Click]:
    """Load a JSON click file: array of {x, y, sign: "+"|"-", strength}."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"click file not found: {path}")
    raw = json.loads(path.read_text())
    if not isinstance(raw, list):
        raise ValueError(f"click file must hold a JSON array: {path}")
    return [parse_click(entry) for entry in raw]


def parse_click(entry: dict) -> Click:
    sign_raw = entry.get("sign", "+")
    if sign_raw in ("+", 1, "1", "+1"):
        sign = 1
    elif sign_raw in ("-", -1, "-1"):
        sign = -1
    else:
        raise ValueError(f"click sign must be '+' or '-', got {sign_raw!r}")
    return Click(
        x=int(entry["x"]),
        y=int(entry["y"]),
        sign=sign,
        strength=float(entry.get("strength", 1.0)),
    )


def save_clicks(clicks: list[Click], path) -> None:
    payload = [
        {"x": c.x, "y": c.y, "sign": "+" if c.sign > 0 else "-", "strength": c.strength}
        for c in clicks
    ]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
