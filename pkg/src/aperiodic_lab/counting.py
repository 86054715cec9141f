"""Patch complexity series, equivalence witnesses, and growth estimators.

Counting is anchored: the side-r patch at anchor x is the r^d block with
minimal corner x, and p(r) is the number of distinct such patches over the
eligible anchors (all anchors, or the marked ones under a pointing rule).
A series entry is flagged certified when the window's language is certified
far enough out that the count is a property of the underlying pattern, not
of the finite window: r + 2*R_p <= certified_radius, where R_p is the
pointing radius (0 for full counting).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._patches import distinct_count, patch_rows, row_keys
from .errors import (
    FormatError,
    InsufficientDataError,
    RangeOverlapError,
    UnsupportedDimensionError,
)

__all__ = [
    "Patch",
    "SeriesEntry",
    "ComplexitySeries",
    "EquivalenceWitness",
    "complexity",
    "check_equivalence",
    "entropy_estimate",
    "EntropyReport",
    "exponent_estimate",
    "morse_hedlund_check",
    "MorseHedlundVerdict",
]

# Dyadic grids for witness searches.  Scales stay on powers of two with
# m <= 1 <= M; constants range over [2^-10, 2^10].
_CONST_GRID = [2.0**k for k in range(-10, 11)]
_SCALE_UP_GRID = [2.0**k for k in range(0, 7)]       # M: 1, 2, ..., 64
_SCALE_DOWN_GRID = [2.0**-k for k in range(0, 7)]    # m: 1, 1/2, ..., 1/64
_SHIFT_CAP = 32


@dataclass(frozen=True)
class Patch:
    """Anchored cube patch with a canonical byte key for hashing."""

    dimension: int
    side: int
    key: bytes

    @classmethod
    def from_cells(cls, cells: np.ndarray) -> "Patch":
        cells = np.ascontiguousarray(cells, dtype=np.uint8)
        side = cells.shape[0]
        if any(s != side for s in cells.shape):
            raise FormatError("patch must be a cube")
        return cls(dimension=cells.ndim, side=side, key=cells.tobytes())

    def cells(self) -> np.ndarray:
        flat = np.frombuffer(self.key, dtype=np.uint8)
        return flat.reshape((self.side,) * self.dimension)


@dataclass(frozen=True)
class SeriesEntry:
    value: float
    certified: bool


@dataclass
class _SeriesBase:
    """Radius-indexed values with per-entry certification flags."""

    entries: dict[int, SeriesEntry] = field(default_factory=dict)
    pointing: str = "full"
    dimension: int | None = None
    source: str = ""

    VALUE_HEADER = "value"

    def rs(self) -> list[int]:
        return sorted(self.entries)

    def certified_rs(self) -> list[int]:
        return sorted(r for r, e in self.entries.items() if e.certified)

    def value(self, r: int) -> float:
        return self.entries[r].value

    def is_certified(self, r: int) -> bool:
        return r in self.entries and self.entries[r].certified

    def set_entry(self, r: int, value: float, certified: bool) -> None:
        self.entries[r] = SeriesEntry(value, certified)

    def to_csv(self) -> str:
        lines = [f"r,{self.VALUE_HEADER},certified"]
        for r in self.rs():
            e = self.entries[r]
            v = int(e.value) if float(e.value).is_integer() else repr(e.value)
            lines.append(f"{r},{v},{'true' if e.certified else 'false'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, **kwargs):
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise FormatError("empty series CSV")
        header = [h.strip() for h in lines[0].split(",")]
        if header != ["r", cls.VALUE_HEADER, "certified"]:
            raise FormatError(
                f"series CSV header must be r,{cls.VALUE_HEADER},certified; got {lines[0]!r}"
            )
        series = cls(**kwargs)
        for ln in lines[1:]:
            parts = [p.strip() for p in ln.split(",")]
            if len(parts) != 3:
                raise FormatError(f"bad series row {ln!r}")
            r = int(parts[0])
            value = float(parts[1])
            flag = parts[2].lower()
            if flag not in ("true", "false"):
                raise FormatError(f"bad certified flag {parts[2]!r}")
            if r in series.entries:
                raise FormatError(f"duplicate radius {r}")
            series.set_entry(r, value, flag == "true")
        return series

    @classmethod
    def synthetic(cls, values: Mapping[int, float] | Callable[[int], float],
                  rs, certified: bool = True, **kwargs):
        series = cls(source="synthetic", **kwargs)
        get = values.__getitem__ if isinstance(values, Mapping) else values
        for r in rs:
            series.set_entry(int(r), float(get(int(r))), certified)
        return series


@dataclass
class ComplexitySeries(_SeriesBase):
    VALUE_HEADER = "count"

    def count(self, r: int) -> int:
        return int(self.entries[r].value)


def _anchor_selection(config, r: int, pointing):
    """Eligible-anchor boolean mask over the anchor grid, plus pointing radius."""
    rows, anchor_shape = patch_rows(config.cells, r)
    if pointing is None:
        return rows, np.ones(anchor_shape, dtype=bool).ravel(), 0
    mask = pointing.mark_mask(config)
    sel = mask[tuple(slice(0, s) for s in anchor_shape)]
    return rows, sel.ravel(), pointing.radius


def complexity(config, rmax: int, pointing=None) -> ComplexitySeries:
    """Distinct anchored side-r patch counts for r = 1..rmax.

    Stops early (without error) once patches of side r no longer fit in the
    window; those radii simply have no entry.
    """
    if rmax < 1:
        raise FormatError("rmax must be >= 1")
    name = "full" if pointing is None else getattr(pointing, "name", "pointed")
    series = ComplexitySeries(
        pointing=name,
        dimension=config.dimension,
        source=f"window{tuple(config.shape)}",
    )
    for r in range(1, rmax + 1):
        if any(s < r for s in config.shape):
            break
        rows, sel, rp = _anchor_selection(config, r, pointing)
        if not sel.any():
            series.set_entry(r, 0, False)
            continue
        count = distinct_count(rows[sel])
        certified = (r + 2 * rp) <= config.certified_radius
        series.set_entry(r, count, certified)
    if pointing is None:
        cert = series.certified_rs()
        vals = [series.value(r) for r in cert]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise AssertionError("full-pointing certified counts must be non-decreasing")
    return series


@dataclass(frozen=True)
class EquivalenceWitness:
    """Two-sided growth comparison between series.

    multiplicative: C1*p2(floor(m*r)) <= p1(r) <= C2*p2(ceil(M*r))
    additive:       m*p2(r-a)        <= p1(r) <= M*p2(r+b)
    slack[r] is the smaller of the two inequality margins at r; all slacks
    nonnegative iff passed.
    """

    form: str
    r_range: tuple[int, int]
    constants: dict
    slack: dict[int, float]
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "form": self.form,
            "range": list(self.r_range),
            "constants": {k: v for k, v in sorted(self.constants.items())},
            "slack": [[r, self.slack[r]] for r in sorted(self.slack)],
            "pass": self.passed,
        }


def _search_side(tested, v1, v2, scales, eval_point, pick_const, side_slack):
    """One inequality side of a witness search.

    Walks `scales` in preference order; the first scale whose evaluation
    points all exist and admit a passing grid constant wins.  If none passes,
    returns the admissible scale with the least-bad worst slack.  Returns
    (found, scale, const, per_r_bound), or None if no scale is admissible.
    """
    best = None
    best_worst = -math.inf
    for scale in scales:
        evals = {}
        ok = True
        for r in tested:
            q = eval_point(scale, r)
            if q not in v2:
                ok = False
                break
            evals[r] = q
        if not ok:
            continue
        found, const = pick_const(evals)
        bound = {r: const * v2[evals[r]] for r in tested}
        worst = min(side_slack(v1[r], bound[r]) for r in tested)
        if found:
            return True, scale, const, bound
        if worst > best_worst:
            best, best_worst = (False, scale, const, bound), worst
    return best


def check_equivalence(p1, p2, r_range, form: str = "multiplicative") -> EquivalenceWitness:
    """Search dyadic grids for a two-sided equivalence witness.

    Scales prefer the strongest claim first (smallest M / largest m, smallest
    shifts); constants are then the tightest grid values that work: smallest
    C2/M, largest C1/m.  If no grid point passes, the witness reports the
    best-found constants with negative slack somewhere.
    """
    if form not in ("multiplicative", "additive"):
        raise FormatError(f"unknown witness form {form!r}")
    rmin, rmax = int(r_range[0]), int(r_range[1])
    if rmin < 1 or rmax < rmin:
        raise FormatError(f"bad range {r_range}")
    dom1 = set(p1.certified_rs())
    dom2 = {r: p2.value(r) for r in p2.certified_rs()}
    tested = [r for r in range(rmin, rmax + 1) if r in dom1]
    if not tested:
        raise RangeOverlapError("first series has no certified entries in range")
    if not dom2:
        raise RangeOverlapError("second series has no certified entries")
    v1 = {r: p1.value(r) for r in tested}
    if any(v <= 0 for v in v1.values()) or any(v <= 0 for v in dom2.values()):
        raise FormatError("witness search needs positive series values")

    def upper_const(evals):
        need = max(v1[r] / dom2[evals[r]] for r in tested)
        for c in _CONST_GRID:
            if c >= need * (1 - 1e-12):
                return True, c
        return False, _CONST_GRID[-1]

    def lower_const(evals):
        room = min(v1[r] / dom2[evals[r]] for r in tested)
        for c in reversed(_CONST_GRID):
            if c <= room * (1 + 1e-12):
                return True, c
        return False, _CONST_GRID[0]

    up_slack = lambda v, bound: bound - v
    lo_slack = lambda v, bound: v - bound

    if form == "multiplicative":
        upper = _search_side(
            tested, v1, dom2, _SCALE_UP_GRID,
            lambda M, r: math.ceil(M * r), upper_const, up_slack)
        lower = _search_side(
            tested, v1, dom2, _SCALE_DOWN_GRID,
            lambda m, r: math.floor(m * r), lower_const, lo_slack)
    else:
        bmax = min(max(dom2) - rmax, _SHIFT_CAP)
        amax = min(rmin - min(dom2), _SHIFT_CAP)
        upper = _search_side(
            tested, v1, dom2, range(0, max(bmax, -1) + 1),
            lambda b, r: r + b, upper_const, up_slack)
        lower = _search_side(
            tested, v1, dom2, range(0, max(amax, -1) + 1),
            lambda a, r: r - a, lower_const, lo_slack)

    if upper is None or lower is None:
        raise RangeOverlapError(
            "certified ranges of the two series do not overlap on the "
            "evaluation points of any admissible scale"
        )
    up_ok, up_scale, up_const, up_bound = upper
    lo_ok, lo_scale, lo_const, lo_bound = lower
    slack = {
        r: min(up_bound[r] - v1[r], v1[r] - lo_bound[r]) for r in tested
    }
    if form == "multiplicative":
        constants = {"C1": lo_const, "m": lo_scale, "C2": up_const, "M": up_scale}
    else:
        constants = {"m": lo_const, "a": int(lo_scale), "M": up_const, "b": int(up_scale)}
    return EquivalenceWitness(
        form=form,
        r_range=(rmin, rmax),
        constants=constants,
        slack=slack,
        passed=bool(up_ok and lo_ok),
    )


@dataclass(frozen=True)
class EntropyReport:
    value: float
    at_r: int
    trend: tuple  # ((r, log p / r^d), ...) over the last quartile of certified rs

    @property
    def trend_decreasing(self) -> bool:
        vals = [v for _, v in self.trend]
        return all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def entropy_estimate(p, dimension: int) -> EntropyReport:
    """log p(r) / r^d at the largest certified r, plus the last-quartile trend."""
    cert = [r for r in p.certified_rs() if p.value(r) >= 1]
    if len(cert) < 4:
        raise InsufficientDataError(
            f"entropy estimate needs >= 4 certified entries, got {len(cert)}"
        )
    def h(r):
        return math.log(p.value(r)) / r**dimension
    r_star = cert[-1]
    quart = cert[-max(2, len(cert) // 4):]
    return EntropyReport(
        value=h(r_star),
        at_r=r_star,
        trend=tuple((r, h(r)) for r in quart),
    )


def exponent_estimate(p, r_range) -> float:
    """Least-squares slope of log p(r) against log r over certified entries."""
    rmin, rmax = int(r_range[0]), int(r_range[1])
    rs = [r for r in p.certified_rs() if rmin <= r <= rmax and r >= 1 and p.value(r) >= 1]
    if len(rs) < 8:
        raise InsufficientDataError(
            f"exponent estimate needs >= 8 certified entries in range, got {len(rs)}"
        )
    x = np.log(np.array(rs, dtype=float))
    y = np.log(np.array([p.value(r) for r in rs], dtype=float))
    slope = float(np.polyfit(x, y, 1)[0])
    return slope


@dataclass(frozen=True)
class MorseHedlundVerdict:
    witness_n: int | None
    rmax_checked: int

    @property
    def periodicity_detected(self) -> bool:
        return self.witness_n is not None


def morse_hedlund_check(p) -> MorseHedlundVerdict:
    """Smallest certified n with p(n) <= n, if any (one dimension only)."""
    if p.dimension == 2:
        raise UnsupportedDimensionError(
            "the p(n) <= n periodicity criterion is one-dimensional"
        )
    cert = p.certified_rs()
    for n in cert:
        if p.value(n) <= n:
            return MorseHedlundVerdict(witness_n=n, rmax_checked=cert[-1])
    return MorseHedlundVerdict(witness_n=None, rmax_checked=cert[-1] if cert else 0)
