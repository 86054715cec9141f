"""Sliding block codes and pointing rules (local derivations on windows).

Both act through centered local patterns: a code or predicate of radius R
reads the side-(2R+1) cube around a cell.  Applying a code shrinks the
window by R on every side and lowers the certified radius by R; pointing
rules turn a configuration into a marked subset of its cells (a transversal
when the predicate singles out a letter or a local event).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from ._patches import patch_rows, row_keys
from .errors import (
    FormatError,
    IncompleteTableError,
    InsufficientWindowError,
    NotRelativelyDenseError,
)
from .symbolic import Alphabet, Configuration

__all__ = [
    "pattern_key",
    "parse_pattern_key",
    "BlockCode",
    "apply_code",
    "MldReport",
    "mld_check",
    "PointingRule",
    "PointedSet",
    "apply_pointing",
    "union_pointing",
]

_CELL_SEP = ","
_ROW_SEP = ";"


def pattern_key(cells: np.ndarray, alphabet: Alphabet) -> str:
    """Canonical string form of a local pattern: cells comma-separated,
    rows (axis 0) separated by semicolons."""
    cells = np.asarray(cells)
    if cells.ndim == 1:
        return _CELL_SEP.join(alphabet.symbols[i] for i in cells)
    return _ROW_SEP.join(
        _CELL_SEP.join(alphabet.symbols[i] for i in row) for row in cells
    )


def parse_pattern_key(key: str, alphabet: Alphabet, dimension: int) -> np.ndarray:
    rows = key.split(_ROW_SEP)
    if dimension == 1:
        if len(rows) != 1:
            raise FormatError(f"1-d pattern key {key!r} has row separators")
        return alphabet.encode(rows[0].split(_CELL_SEP))
    mat = [row.split(_CELL_SEP) for row in rows]
    if len({len(r) for r in mat}) != 1:
        raise FormatError(f"ragged pattern key {key!r}")
    return alphabet.encode(mat)


@dataclass(frozen=True)
class BlockCode:
    """Radius-R recoding table: centered (2R+1)^d pattern -> output symbol."""

    dimension: int
    radius: int
    in_alphabet: Alphabet
    out_alphabet: Alphabet
    table: Mapping[bytes, int]
    name: str = "code"

    def __post_init__(self):
        if self.radius < 0:
            raise FormatError("code radius must be >= 0")
        side = 2 * self.radius + 1
        want = side**self.dimension
        for k, v in self.table.items():
            if len(k) != want:
                raise FormatError(
                    f"table key of length {len(k)}, expected {want} cells"
                )
            if not 0 <= v < len(self.out_alphabet):
                raise FormatError("table value outside output alphabet")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    def output_index(self, pattern: np.ndarray) -> int:
        key = np.ascontiguousarray(pattern, dtype=np.uint8).tobytes()
        try:
            return self.table[key]
        except KeyError:
            raise IncompleteTableError(
                pattern_key(pattern.reshape((self.side,) * self.dimension),
                            self.in_alphabet),
                what=f"block code {self.name!r}",
            ) from None

    @classmethod
    def from_function(
        cls,
        config: Configuration,
        radius: int,
        fn: Callable[[np.ndarray], str],
        out_alphabet: Alphabet,
        name: str = "code",
    ) -> "BlockCode":
        """Tabulate fn over every centered pattern observed in the window."""
        side = 2 * radius + 1
        rows, _ = patch_rows(config.cells, side)
        table = {}
        for key in np.unique(row_keys(rows)):
            cells = np.frombuffer(key.tobytes(), dtype=np.uint8).reshape(
                (side,) * config.dimension
            )
            table[key.tobytes()] = out_alphabet.index(fn(cells))
        return cls(
            dimension=config.dimension,
            radius=radius,
            in_alphabet=config.alphabet,
            out_alphabet=out_alphabet,
            table=table,
            name=name,
        )


def apply_code(config: Configuration, code: BlockCode) -> Configuration:
    """Recode the window; the result is smaller by R per side and its
    certified radius drops by R."""
    if code.dimension != config.dimension:
        raise FormatError("code and configuration dimensions differ")
    if config.certified_radius <= code.radius:
        raise InsufficientWindowError(
            f"need certified_radius > {code.radius}, have {config.certified_radius}"
        )
    if any(s < code.side for s in config.shape):
        raise InsufficientWindowError("window smaller than the code neighborhood")
    rows, anchor_shape = patch_rows(config.cells, code.side)
    keys = row_keys(rows)
    uniq, inverse = np.unique(keys, return_inverse=True)
    out_of = np.array(
        [code.output_index(np.frombuffer(u.tobytes(), dtype=np.uint8)) for u in uniq],
        dtype=np.uint8,
    )
    out = out_of[inverse]
    return Configuration(
        dimension=config.dimension,
        alphabet=code.out_alphabet,
        cells=out.reshape(anchor_shape),
        origin=tuple(o + code.radius for o in config.origin),
        provenance=f"{code.name} applied to {config.provenance}",
        certified_radius=config.certified_radius - code.radius,
    )


@dataclass(frozen=True)
class MldReport:
    mld: bool
    failing_cell: tuple | None
    total_radius: int


def mld_check(
    config: Configuration,
    code: BlockCode,
    candidate_inverse: BlockCode,
) -> MldReport:
    """Does candidate_inverse undo code on the common interior of the window?"""
    forward = apply_code(config, code)
    back = apply_code(forward, candidate_inverse)
    t = code.radius + candidate_inverse.radius
    sl = tuple(slice(t, s - t) for s in config.shape)
    original = config.cells[sl]
    if original.shape != back.cells.shape:
        raise InsufficientWindowError("window too small for a round-trip check")
    diff = original != back.cells
    if diff.any():
        cell = tuple(int(c) + t for c in np.argwhere(diff)[0])
        return MldReport(mld=False, failing_cell=cell, total_radius=t)
    return MldReport(mld=True, failing_cell=None, total_radius=t)


@dataclass(frozen=True)
class PointingRule:
    """Radius-R local predicate.  Either a total table over observed patterns
    (loadable from JSON) or a plain function of the centered pattern."""

    dimension: int
    radius: int
    name: str = "pointing"
    table: Mapping[bytes, bool] | None = None
    fn: Callable[[np.ndarray], bool] | None = None
    alphabet: Alphabet | None = None

    def __post_init__(self):
        if (self.table is None) == (self.fn is None):
            raise FormatError("pointing rule needs exactly one of table or fn")
        if self.radius < 0:
            raise FormatError("pointing radius must be >= 0")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    def evaluate(self, pattern: np.ndarray) -> bool:
        pattern = np.ascontiguousarray(pattern, dtype=np.uint8)
        if self.table is not None:
            key = pattern.tobytes()
            if key not in self.table:
                label = (
                    pattern_key(pattern.reshape((self.side,) * self.dimension),
                                self.alphabet)
                    if self.alphabet is not None
                    else repr(key)
                )
                raise IncompleteTableError(label, what=f"pointing rule {self.name!r}")
            return bool(self.table[key])
        return bool(self.fn(pattern.reshape((self.side,) * self.dimension)))

    def mark_mask(self, config: Configuration) -> np.ndarray:
        """Boolean mask over window cells; cells too close to the boundary to
        evaluate the predicate are unmarked."""
        if self.dimension != config.dimension:
            raise FormatError("pointing rule and configuration dimensions differ")
        mask = np.zeros(config.shape, dtype=bool)
        if any(s < self.side for s in config.shape):
            return mask
        rows, anchor_shape = patch_rows(config.cells, self.side)
        keys = row_keys(rows)
        uniq, inverse = np.unique(keys, return_inverse=True)
        verdicts = np.array(
            [
                self.evaluate(np.frombuffer(u.tobytes(), dtype=np.uint8))
                for u in uniq
            ],
            dtype=bool,
        )
        centers = verdicts[inverse].reshape(anchor_shape)
        sl = tuple(slice(self.radius, self.radius + s) for s in anchor_shape)
        mask[sl] = centers
        return mask

    @classmethod
    def mark_all(cls, alphabet: Alphabet, dimension: int = 1) -> "PointingRule":
        table = {np.uint8(i).tobytes(): True for i in range(len(alphabet))}
        return cls(
            dimension=dimension, radius=0, name="all", table=table, alphabet=alphabet
        )

    @classmethod
    def mark_symbol(cls, alphabet: Alphabet, symbol: str, dimension: int = 1) -> "PointingRule":
        idx = alphabet.index(symbol)
        table = {np.uint8(i).tobytes(): i == idx for i in range(len(alphabet))}
        return cls(
            dimension=dimension,
            radius=0,
            name=f"mark-{symbol}",
            table=table,
            alphabet=alphabet,
        )


@dataclass(frozen=True)
class PointedSet:
    """Marked cells of a window with measured lattice Delaunay constants."""

    rule_name: str
    coords: np.ndarray          # (N, d) int anchors
    discreteness: float         # min pairwise chess-distance (inf for N=1)
    covering: int               # max chess-distance from interior cells to a mark
    cap: int

    @property
    def n_marks(self) -> int:
        return len(self.coords)

    def points(self) -> np.ndarray:
        return self.coords.astype(float)


def apply_pointing(config: Configuration, rule: PointingRule, density_cap: int = 64) -> PointedSet:
    """Mark cells by the rule and measure discreteness / covering radii.

    Raises NotRelativelyDenseError when no mark exists or some evaluable
    interior cell is farther than density_cap from every mark.
    """
    from scipy import ndimage

    mask = rule.mark_mask(config)
    coords = np.argwhere(mask)
    span = int(max(config.shape))
    if len(coords) == 0:
        raise NotRelativelyDenseError(gap=span, cap=density_cap)
    if len(coords) == 1:
        m = float("inf")
    else:
        from scipy.spatial import cKDTree

        tree = cKDTree(coords.astype(float))
        dists, _ = tree.query(coords.astype(float), k=2, p=np.inf)
        m = float(dists[:, 1].min())
    dist = ndimage.distance_transform_cdt(~mask, metric="chessboard")
    interior = tuple(
        slice(rule.radius, s - rule.radius) for s in config.shape
    )
    covering = int(dist[interior].max())
    if covering > density_cap:
        raise NotRelativelyDenseError(gap=covering, cap=density_cap)
    return PointedSet(
        rule_name=rule.name,
        coords=coords,
        discreteness=m,
        covering=covering,
        cap=density_cap,
    )


def union_pointing(rule_a: PointingRule, rule_b: PointingRule) -> PointingRule:
    """Disjunction of two rules; the radius is the larger of the two and each
    rule reads its own centered sub-pattern."""
    if rule_a.dimension != rule_b.dimension:
        raise FormatError("pointing rules live in different dimensions")
    radius = max(rule_a.radius, rule_b.radius)

    def central(pattern: np.ndarray, r: int) -> np.ndarray:
        off = radius - r
        sl = tuple(slice(off, off + 2 * r + 1) for _ in range(pattern.ndim))
        return pattern[sl]

    def fn(pattern: np.ndarray) -> bool:
        return rule_a.evaluate(central(pattern, rule_a.radius)) or rule_b.evaluate(
            central(pattern, rule_b.radius)
        )

    return PointingRule(
        dimension=rule_a.dimension,
        radius=radius,
        name=f"{rule_a.name}|{rule_b.name}",
        fn=fn,
        alphabet=rule_a.alphabet or rule_b.alphabet,
    )
