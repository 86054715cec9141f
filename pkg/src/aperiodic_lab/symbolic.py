"""Alphabets, block substitution rules, and certified configurations.

A configuration is a finite axis-aligned window of a Z^d symbolic pattern
(d = 1 or 2): a uint8 array of symbol indices plus bookkeeping about how it
was produced and up to which patch side its language is certified.  Cells
play the role of unit cubes of the lattice; the anchored side-r patch at a
cell is the r^d block whose minimal corner sits at that cell.

Certification is by level stabilization: the window one substitution level
deeper is computed and the anchored patch sets of the two windows are
compared side by side, from r = 1 upward, until they first differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._patches import distinct_set, patch_rows
from .errors import CapacityError, FormatError

DEFAULT_CELL_CAP = 50_000_000

__all__ = [
    "Alphabet",
    "SubstitutionRule",
    "Provenance",
    "Configuration",
    "PrimitivityReport",
    "expand",
    "certify_language",
    "primitivity_check",
]


@dataclass(frozen=True)
class Alphabet:
    """Ordered symbol identifiers, optionally with display names."""

    symbols: tuple[str, ...]
    display: Mapping[str, str] | None = None

    def __post_init__(self):
        if not self.symbols:
            raise FormatError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise FormatError("alphabet symbols must be unique")
        if any(not s for s in self.symbols):
            raise FormatError("alphabet symbols must be non-empty strings")
        if len(self.symbols) > 255:
            raise FormatError("alphabets with more than 255 symbols are not supported")
        object.__setattr__(
            self, "_index", {s: i for i, s in enumerate(self.symbols)}
        )

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise FormatError(f"symbol {symbol!r} not in alphabet") from None

    def encode(self, symbols) -> np.ndarray:
        """Symbol sequence (or nested rows for d=2) -> uint8 index array."""
        symbols = list(symbols)
        if symbols and isinstance(symbols[0], (list, tuple)):
            return np.asarray(
                [[self.index(s) for s in row] for row in symbols], dtype=np.uint8
            )
        return np.asarray([self.index(s) for s in symbols], dtype=np.uint8)

    def name_of(self, symbol: str) -> str:
        return (self.display or {}).get(symbol, symbol)


@dataclass(frozen=True)
class SubstitutionRule:
    """Cell substitution: each symbol maps to a word (d=1) or a uniform
    rectangular block of symbols (d=2, rows listed along axis 0)."""

    alphabet: Alphabet
    dimension: int
    images: Mapping[str, tuple]
    rule_id: str = "rule"

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise FormatError(f"dimension must be 1 or 2, got {self.dimension}")
        missing = [s for s in self.alphabet.symbols if s not in self.images]
        if missing:
            raise FormatError(f"rule has no image for symbols {missing}")
        extra = [s for s in self.images if s not in self.alphabet]
        if extra:
            raise FormatError(f"rule has images for unknown symbols {extra}")
        norm = {}
        if self.dimension == 1:
            for s, img in self.images.items():
                img = tuple(img)
                if not img:
                    raise FormatError(f"image of {s!r} is empty")
                for t in img:
                    self.alphabet.index(t)
                norm[s] = img
        else:
            shape = None
            for s, img in self.images.items():
                rows = tuple(tuple(row) for row in img)
                if not rows or any(not row for row in rows):
                    raise FormatError(f"image of {s!r} is empty")
                widths = {len(row) for row in rows}
                if len(widths) != 1:
                    raise FormatError(f"image of {s!r} is ragged")
                blk = (len(rows), len(rows[0]))
                if shape is None:
                    shape = blk
                elif blk != shape:
                    raise FormatError(
                        f"image of {s!r} has block shape {blk}, expected {shape}"
                    )
                for row in rows:
                    for t in row:
                        self.alphabet.index(t)
                norm[s] = rows
        object.__setattr__(self, "images", norm)

    @property
    def block_shape(self) -> tuple[int, ...]:
        """Uniform image shape (d=2 only)."""
        if self.dimension != 1:
            first = next(iter(self.images.values()))
            return (len(first), len(first[0]))
        raise FormatError("1-d rules have no uniform block shape")

    def image_arrays(self) -> list[np.ndarray]:
        """Per-symbol uint8 image arrays, indexed by symbol position."""
        out = []
        for s in self.alphabet.symbols:
            img = self.images[s]
            if self.dimension == 1:
                out.append(np.array([self.alphabet.index(t) for t in img], dtype=np.uint8))
            else:
                out.append(
                    np.array(
                        [[self.alphabet.index(t) for t in row] for row in img],
                        dtype=np.uint8,
                    )
                )
        return out

    def abelianization(self) -> np.ndarray:
        """Matrix M with M[i, j] = occurrences of symbol i in the image of j."""
        n = len(self.alphabet)
        m = np.zeros((n, n), dtype=np.int64)
        for j, s in enumerate(self.alphabet.symbols):
            img = self.images[s]
            cells = img if self.dimension == 1 else [t for row in img for t in row]
            for t in cells:
                m[self.alphabet.index(t), j] += 1
        return m


@dataclass(frozen=True)
class Provenance:
    rule_id: str
    seed: str
    levels: int

    def describe(self) -> str:
        return f"{self.rule_id}^{self.levels}({self.seed})"


@dataclass(eq=False)
class Configuration:
    """Finite window with origin at its minimal corner.

    certified_radius is 0 until certify_language stores a stabilized value;
    manually built configurations may assert a radius the caller can justify
    (e.g. explicitly periodic test words).
    """

    dimension: int
    alphabet: Alphabet
    cells: np.ndarray
    origin: tuple[int, ...] = ()
    provenance: Provenance | str = "manual"
    certified_radius: int = 0

    def __post_init__(self):
        self.cells = np.ascontiguousarray(self.cells, dtype=np.uint8)
        if self.cells.ndim != self.dimension:
            raise FormatError(
                f"cells array has {self.cells.ndim} axes, dimension is {self.dimension}"
            )
        if not self.origin:
            self.origin = (0,) * self.dimension
        if int(self.cells.max(initial=0)) >= len(self.alphabet):
            raise FormatError("cell index out of alphabet range")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells.shape

    @property
    def n_cells(self) -> int:
        return int(self.cells.size)

    def symbol_at(self, cell) -> str:
        return self.alphabet.symbols[int(self.cells[tuple(np.atleast_1d(cell))])]

    def subwindow(self, lo, hi) -> "Configuration":
        """Cells in the half-open box [lo, hi); certification does not carry over."""
        sl = tuple(slice(a, b) for a, b in zip(np.atleast_1d(lo), np.atleast_1d(hi)))
        return Configuration(
            dimension=self.dimension,
            alphabet=self.alphabet,
            cells=self.cells[sl].copy(),
            origin=tuple(int(o + a) for o, a in zip(self.origin, np.atleast_1d(lo))),
            provenance="manual",
            certified_radius=0,
        )


def expand(
    rule: SubstitutionRule,
    seed: str,
    levels: int,
    cell_cap: int = DEFAULT_CELL_CAP,
) -> Configuration:
    """Iterate the rule `levels` times on a single seed symbol.

    The window is laid out with the origin at the minimal corner.  Raises
    CapacityError before materializing a window larger than cell_cap cells.
    """
    if levels < 0:
        raise FormatError("levels must be >= 0")
    imgs = rule.image_arrays()
    cells = np.array([rule.alphabet.index(seed)], dtype=np.uint8)
    if rule.dimension == 2:
        cells = cells.reshape(1, 1)
        imgs_arr = np.stack(imgs)  # (n_symbols, h, w)
        h, w = rule.block_shape
        for _ in range(levels):
            nxt = cells.shape[0] * h * cells.shape[1] * w
            if nxt > cell_cap:
                raise CapacityError(
                    f"expansion would reach {nxt} cells, cap is {cell_cap}"
                )
            blocks = imgs_arr[cells]  # (H, W, h, w)
            cells = blocks.transpose(0, 2, 1, 3).reshape(
                cells.shape[0] * h, cells.shape[1] * w
            )
    else:
        lengths = np.array([len(a) for a in imgs], dtype=np.int64)
        for _ in range(levels):
            nxt = int(np.bincount(cells, minlength=len(imgs)) @ lengths)
            if nxt > cell_cap:
                raise CapacityError(
                    f"expansion would reach {nxt} cells, cap is {cell_cap}"
                )
            cells = np.concatenate([imgs[s] for s in cells])
    return Configuration(
        dimension=rule.dimension,
        alphabet=rule.alphabet,
        cells=cells,
        provenance=Provenance(rule.rule_id, seed, levels),
    )


def certify_language(
    rule: SubstitutionRule,
    config: Configuration,
    rmax: int,
    cell_cap: int = DEFAULT_CELL_CAP,
) -> int:
    """Largest r <= rmax whose anchored patch set agrees with one level deeper.

    Scans r = 1, 2, ... and stops at the first disagreement (or when patches
    of side r no longer fit in the window).  The result is stored on the
    configuration and returned.
    """
    prov = config.provenance
    if not isinstance(prov, Provenance) or prov.rule_id != rule.rule_id:
        raise FormatError(
            "certification needs a configuration produced by this rule"
        )
    deeper = expand(rule, prov.seed, prov.levels + 1, cell_cap=cell_cap)
    certified = 0
    for r in range(1, rmax + 1):
        if any(s < r for s in config.shape) or any(s < r for s in deeper.shape):
            break
        here = distinct_set(patch_rows(config.cells, r)[0])
        there = distinct_set(patch_rows(deeper.cells, r)[0])
        if here != there:
            break
        certified = r
    config.certified_radius = certified
    return certified


@dataclass(frozen=True)
class PrimitivityReport:
    primitive: bool
    power: int | None
    checked_up_to: int


def primitivity_check(rule: SubstitutionRule) -> PrimitivityReport:
    """Smallest k <= |alphabet|^2 with M^k > 0 entrywise, via boolean powers."""
    m = rule.abelianization() > 0
    kmax = len(rule.alphabet) ** 2
    p = m.copy()
    for k in range(1, kmax + 1):
        if p.all():
            return PrimitivityReport(primitive=True, power=k, checked_up_to=kmax)
        p = (p @ m) > 0
    return PrimitivityReport(primitive=False, power=None, checked_up_to=kmax)
