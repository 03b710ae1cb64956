"""Fallback fine-partition initializer.

Real pipelines supply a fine superpixel map from an external model; this
grid initializer exists so the engine, demos and tests are self-contained.
"""

from __future__ import annotations

import math

import numpy as np


def grid_partition(width: int, height: int, n: int) -> np.ndarray:
    """Split the image into exactly `n` 4-connected rectangular regions.

    Lays out a near-square grid of ceil(sqrt(n * width / height)) columns
    and ceil(n / columns) rows, then folds the surplus trailing cells of
    the last row into their left neighbor so exactly `n` regions remain.
    Labels are contiguous, assigned row-major over cells.
    """
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    if not 1 <= n <= width * height:
        raise ValueError(f"region count {n} outside [1, {width * height}]")

    cols = min(math.ceil(math.sqrt(n * width / height)), width, n)
    rows = min(math.ceil(n / cols), height)
    # n <= width*height guarantees the clamped grid still covers n cells
    assert rows * cols >= n, (width, height, n, rows, cols)

    x_edges = (np.arange(cols + 1) * width) // cols
    y_edges = (np.arange(rows + 1) * height) // rows
    col_of_x = np.repeat(np.arange(cols), np.diff(x_edges))
    row_of_y = np.repeat(np.arange(rows), np.diff(y_edges))

    cell = row_of_y[:, np.newaxis] * cols + col_of_x[np.newaxis, :]
    # surplus cells sit at the end of the bottom row; fold them into label n-1
    return np.minimum(cell, n - 1).astype(np.int32)
