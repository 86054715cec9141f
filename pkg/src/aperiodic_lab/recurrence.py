"""Repetitivity series and return vectors.

R(r) is read as the smallest sufficient radius: the largest, over anchors x
in the safe interior, of the largest, over side-r patches P of the window,
of the chess-distance from x to the nearest anchor carrying P.  Every ball
of that radius around an interior anchor therefore contains every patch.

The finite-window surrogate is trusted (flagged certified) when two things
hold: the value does not change when the safe interior is shrunk by one more
substitution level, and the value is at most the margin itself, so that no
nearer occurrence can be hiding outside the window.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ._patches import group_inverse, patch_rows
from .counting import _SeriesBase, check_equivalence, EquivalenceWitness
from .errors import (
    FormatError,
    InsufficientDataError,
    InsufficientWindowError,
)

__all__ = [
    "RepetitivitySeries",
    "ReturnVectorSet",
    "repetitivity",
    "linear_repetitivity_check",
    "LinearRepetitivityReport",
    "repetitivity_equivalence",
    "return_vectors",
]


@dataclass
class RepetitivitySeries(_SeriesBase):
    VALUE_HEADER = "value"


def _marked_anchor_mask(config, r, pointing):
    rows, anchor_shape = patch_rows(config.cells, r)
    if pointing is None:
        marked = np.ones(anchor_shape, dtype=bool)
        rp = 0
    else:
        mask = pointing.mark_mask(config)
        marked = mask[tuple(slice(0, s) for s in anchor_shape)]
        rp = pointing.radius
    return rows, anchor_shape, marked, rp


def _interior_mask(anchor_shape, window_shape, r, margin):
    """Anchors whose cell sits at least `margin` cells from the window edge
    (patch support included on the high side)."""
    grids = np.indices(anchor_shape)
    ok = np.ones(anchor_shape, dtype=bool)
    for ax, n in enumerate(window_shape):
        ok &= grids[ax] >= margin
        ok &= grids[ax] <= n - r - margin
    return ok


def repetitivity(
    config,
    rmax: int,
    pointing=None,
    margin: int | None = None,
    level_growth: int = 2,
) -> RepetitivitySeries:
    """R(r) for r = 1..rmax on the window's safe interior.

    level_growth is the linear size one substitution level adds to a cell
    (max image extent); the certification re-check shrinks the interior by
    that much.  Requires the language certified through rmax.
    """
    if rmax < 1:
        raise FormatError("rmax must be >= 1")
    if rmax > config.certified_radius:
        raise InsufficientDataError(
            f"repetitivity needs certified_radius >= {rmax}, "
            f"have {config.certified_radius}"
        )
    if margin is None:
        margin = max(1, min(config.shape) // 4)
    name = "full" if pointing is None else getattr(pointing, "name", "pointed")
    series = RepetitivitySeries(
        pointing=name,
        dimension=config.dimension,
        source=f"window{tuple(config.shape)} margin {margin}",
    )
    for r in range(1, rmax + 1):
        rows, anchor_shape, marked, _ = _marked_anchor_mask(config, r, pointing)
        interior = _interior_mask(anchor_shape, config.shape, r, margin) & marked
        interior2 = _interior_mask(
            anchor_shape, config.shape, r, margin + level_growth
        ) & marked
        if not interior.any() or not interior2.any():
            raise InsufficientWindowError(
                f"margin {margin}+{level_growth} leaves no interior anchors at r={r}"
            )
        flat_marked = marked.ravel()
        n_groups, inv = group_inverse(rows[flat_marked])
        group_grid = np.full(anchor_shape, -1, dtype=np.int64)
        group_grid.ravel()[np.flatnonzero(flat_marked)] = inv
        # farthest[x] = max over patches P of chess-distance from x to the
        # nearest marked anchor carrying P
        farthest = np.zeros(anchor_shape, dtype=np.int64)
        for g in range(n_groups):
            occupied = group_grid == g
            dist = ndimage.distance_transform_cdt(~occupied, metric="chessboard")
            np.maximum(farthest, dist, out=farthest)
        value = int(farthest[interior].max())
        value2 = int(farthest[interior2].max())
        certified = (value == value2) and (value <= margin)
        series.set_entry(r, value, certified)
    return series


@dataclass(frozen=True)
class LinearRepetitivityReport:
    lambda_hat: float
    quartile_slope: float
    quartile_max: float
    head_max: float
    lr_consistent: bool
    slope_tolerance: float = 0.01


def linear_repetitivity_check(series: RepetitivitySeries) -> LinearRepetitivityReport:
    """lambda_hat = max certified R(r)/r, plus the last-quartile ratio trend.

    R(r) is a step function, so the raw least-squares slope of R(r)/r over
    the last quartile is jittery (a single jump inside the quartile makes it
    positive).  The trend is called LR-consistent when either the slope is
    flat-or-falling within tolerance, or the quartile attains no new maximum
    of the ratio: a genuine violation keeps setting fresh maxima.
    """
    cert = [r for r in series.certified_rs() if r >= 1]
    if not cert:
        raise InsufficientDataError("no certified repetitivity entries")
    ratios = {r: series.value(r) / r for r in cert}
    lam = max(ratios.values())
    quart = cert[-max(2, len(cert) // 4):]
    head = cert[: len(cert) - len(quart)]
    if len(quart) >= 2:
        x = np.array(quart, dtype=float)
        y = np.array([ratios[r] for r in quart])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = 0.0
    quartile_max = max(ratios[r] for r in quart)
    head_max = max((ratios[r] for r in head), default=-np.inf)
    tol = 0.01
    consistent = (slope <= tol) or (quartile_max <= head_max * (1 + 1e-9))
    return LinearRepetitivityReport(
        lambda_hat=float(lam),
        quartile_slope=slope,
        quartile_max=float(quartile_max),
        head_max=float(head_max),
        lr_consistent=bool(consistent),
        slope_tolerance=tol,
    )


def repetitivity_equivalence(
    r1: RepetitivitySeries,
    r2: RepetitivitySeries,
    r_range,
    form: str = "multiplicative",
) -> EquivalenceWitness:
    """Same dyadic witness search as for complexity, applied to R series."""
    return check_equivalence(r1, r2, r_range, form)


@dataclass(frozen=True)
class ReturnVectorSet:
    """Difference vectors between equal-patch marked anchors, with multiplicity.

    The zero vector is excluded; v and -v always appear together because the
    underlying relation is symmetric.
    """

    radius: int
    max_norm: int
    vectors: dict

    def __contains__(self, v) -> bool:
        return tuple(int(c) for c in v) in self.vectors

    def count(self, v) -> int:
        return self.vectors.get(tuple(int(c) for c in v), 0)


def return_vectors(config, pointing, r: int, max_norm: int, margin: int = 0) -> ReturnVectorSet:
    """All y - x with equal anchored r-patches at marked anchors x, y,
    restricted to chess-norm at most max_norm."""
    if max_norm < 1:
        raise FormatError("max_norm must be >= 1")
    rows, anchor_shape, marked, _ = _marked_anchor_mask(config, r, pointing)
    eligible = marked
    if margin:
        eligible = eligible & _interior_mask(anchor_shape, config.shape, r, margin)
    flat = eligible.ravel()
    n_groups, inv = group_inverse(rows[flat])
    coords = np.argwhere(eligible)
    vectors: dict[tuple, int] = {}
    if config.dimension == 1:
        by_group: dict[int, list[int]] = {}
        for (x,), g in zip(coords, inv):
            by_group.setdefault(int(g), []).append(int(x))
        for xs in by_group.values():
            xs.sort()
            for i, x in enumerate(xs):
                hi = bisect.bisect_right(xs, x + max_norm)
                for j in range(i + 1, hi):
                    v = xs[j] - x
                    vectors[(v,)] = vectors.get((v,), 0) + 1
                    vectors[(-v,)] = vectors.get((-v,), 0) + 1
    else:
        by_group = {}
        for (x0, x1), g in zip(coords, inv):
            by_group.setdefault(int(g), []).append((int(x0), int(x1)))
        for pts in by_group.values():
            pts.sort()
            for i, (a0, a1) in enumerate(pts):
                for b0, b1 in pts[i + 1:]:
                    if b0 - a0 > max_norm:
                        break
                    if abs(b1 - a1) > max_norm:
                        continue
                    v = (b0 - a0, b1 - a1)
                    nv = (-v[0], -v[1])
                    vectors[v] = vectors.get(v, 0) + 1
                    vectors[nv] = vectors.get(nv, 0) + 1
    return ReturnVectorSet(radius=r, max_norm=max_norm, vectors=vectors)
