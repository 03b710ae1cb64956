"""Per-pixel feature assembly.

The combined feature field is a (H, W, d) float64 array laid out as three
channel groups: 3 color channels first (CIELAB rescaled to [0, 1]), then 2
position channels (x and y normalized by axis length), then d - 5 deep
feature channels taken as provided. Merge costs split on this layout, so
the ordering is part of the package contract.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import map_coordinates

from .imgio import Click

# channel group layout: [color(3), position(2), deep(d - 5)]
N_COLOR = 3
N_POSITION = 2
SPATIAL_SLICE = slice(3, 5)

# sRGB -> XYZ (D65) matrix; white point taken as the matrix row sums so
# achromatic inputs stay achromatic to rounding noise
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_WHITE_D65 = _RGB_TO_XYZ.sum(axis=1)


def appearance_indices(d: int) -> np.ndarray:
    """Indices of the non-spatial channels (color + deep) for a d-channel field."""
    if d < 5:
        raise ValueError(f"feature field needs at least 5 channels, got {d}")
    return np.concatenate([np.arange(0, 3), np.arange(5, d)])


def rgb_to_lab(img: np.ndarray) -> np.ndarray:
    """Convert a (H, W, 3) uint8 sRGB image to rescaled CIELAB planes.

    Uses the D65 white point. L is divided by 100; a and b are mapped
    affinely from [-128, 127] to [0, 1]. Output is (H, W, 3) float64.
    """
    rgb = np.asarray(img, dtype=np.float64) / 255.0
    linear = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE_D65

    delta = 6.0 / 29.0
    f = np.where(t > delta**3, np.cbrt(t), t / (3.0 * delta**2) + 4.0 / 29.0)

    lightness = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])

    out = np.empty(img.shape[:2] + (3,), dtype=np.float64)
    out[..., 0] = lightness / 100.0
    out[..., 1] = (a + 128.0) / 255.0
    out[..., 2] = (b + 128.0) / 255.0
    return out


def position_planes(width: int, height: int) -> np.ndarray:
    """Normalized pixel coordinates: channel 0 is x/(W-1), channel 1 is y/(H-1).

    Degenerate axes (width or height 1) get coordinate 0.
    """
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    xs = np.arange(width, dtype=np.float64) / (width - 1) if width > 1 else np.zeros(1)
    ys = (
        np.arange(height, dtype=np.float64) / (height - 1)
        if height > 1
        else np.zeros(1)
    )
    out = np.empty((height, width, 2), dtype=np.float64)
    out[..., 0] = xs[np.newaxis, :]
    out[..., 1] = ys[:, np.newaxis]
    return out


def assemble_features(
    lab: np.ndarray, pos: np.ndarray, deep: np.ndarray | None = None
) -> np.ndarray:
    """Concatenate [color, position, deep] planes into one (H, W, d) field.

    Deep planes are optional; without them d = 5.
    """
    parts = [np.asarray(lab, dtype=np.float64), np.asarray(pos, dtype=np.float64)]
    if deep is not None:
        parts.append(np.asarray(deep, dtype=np.float64))
    shape = parts[0].shape[:2]
    for p in parts:
        if p.ndim != 3 or p.shape[:2] != shape:
            raise ValueError(
                f"feature planes disagree on image size: {[q.shape for q in parts]}"
            )
    if parts[0].shape[2] != N_COLOR or parts[1].shape[2] != N_POSITION:
        raise ValueError("expected 3 color channels and 2 position channels")
    return np.concatenate(parts, axis=2)


def resample_attention(raw: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bilinearly resample an attention map to (height, width), clamped to [0, 1].

    Endpoints align: source corners map to target corners.
    """
    src = np.asarray(raw, dtype=np.float64)
    if src.ndim != 2 or src.size == 0:
        raise ValueError(f"expected non-empty (H, W) attention map, got {src.shape}")
    sh, sw = src.shape
    ys = np.linspace(0.0, sh - 1.0, height) if sh > 1 else np.zeros(height)
    xs = np.linspace(0.0, sw - 1.0, width) if sw > 1 else np.zeros(width)
    grid = np.meshgrid(ys, xs, indexing="ij")
    out = map_coordinates(src, grid, order=1, mode="nearest")
    return np.clip(out, 0.0, 1.0)


def clicks_to_attention(
    clicks: list[Click],
    base: np.ndarray | None,
    width: int,
    height: int,
) -> np.ndarray:
    """Rasterize clicks into an attention map.

    Starts from `base` (or zeros) and adds, per click, a gaussian stamp of
    peak sign * strength with sigma = 5% of the image diagonal. The sum is
    clamped to [0, 1] at the end, so opposite clicks cancel before clamping.
    """
    if base is not None:
        acc = np.asarray(base, dtype=np.float64).copy()
        if acc.shape != (height, width):
            raise ValueError(
                f"base attention is {acc.shape}, expected {(height, width)}"
            )
    else:
        acc = np.zeros((height, width), dtype=np.float64)
    if not clicks:
        return acc

    sigma = 0.05 * math.hypot(width, height)
    ys = np.arange(height, dtype=np.float64)[:, np.newaxis]
    xs = np.arange(width, dtype=np.float64)[np.newaxis, :]
    for c in clicks:
        if not (0 <= c.x < width and 0 <= c.y < height):
            raise ValueError(f"click ({c.x}, {c.y}) outside {width}x{height} image")
        d2 = (xs - c.x) ** 2 + (ys - c.y) ** 2
        acc += c.sign * c.strength * np.exp(-d2 / (2.0 * sigma**2))
    return np.clip(acc, 0.0, 1.0)
