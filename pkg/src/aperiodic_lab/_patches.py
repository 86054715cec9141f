"""Shared anchored-patch extraction helpers.

An anchored patch of side r is the side-r cube of cells whose minimal corner
sits at the anchor cell.  Helpers here return patches as rows of a 2-D uint8
array (one row per anchor, C-order scan of anchors), which makes distinct
counting a row-dedup problem.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InsufficientWindowError


def patch_rows(cells: np.ndarray, r: int):
    """Return (rows, anchor_shape) for all side-r anchored patches.

    rows[k] is the flattened patch anchored at np.unravel_index(k, anchor_shape).
    """
    if r < 1:
        raise ValueError(f"patch side must be >= 1, got {r}")
    if any(s < r for s in cells.shape):
        raise InsufficientWindowError(
            f"window {cells.shape} too small for side-{r} patches"
        )
    win = sliding_window_view(cells, (r,) * cells.ndim)
    anchor_shape = win.shape[: cells.ndim]
    rows = win.reshape(-1, r**cells.ndim)
    return rows, anchor_shape


def row_keys(rows: np.ndarray) -> np.ndarray:
    """View each row as one opaque fixed-width item so numpy can sort/dedup."""
    a = np.ascontiguousarray(rows)
    if a.shape[1] == 0:
        raise ValueError("empty rows")
    return a.view(np.dtype((np.void, a.shape[1] * a.itemsize))).ravel()


def distinct_count(rows: np.ndarray) -> int:
    return len(np.unique(row_keys(rows)))


def distinct_set(rows: np.ndarray) -> set[bytes]:
    return {v.tobytes() for v in np.unique(row_keys(rows))}


def group_inverse(rows: np.ndarray):
    """Return (n_groups, inverse) where inverse[k] is the patch id of row k."""
    _, inverse = np.unique(row_keys(rows), return_inverse=True)
    return int(inverse.max()) + 1 if len(inverse) else 0, inverse
