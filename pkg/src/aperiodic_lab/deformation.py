"""Pattern-equivariant edge cocycles and the deformations they integrate to.

An edge cocycle assigns a vector of R^d to every lattice edge, where the
value depends only on the symbol pattern in a cube of side 2R + 1 centered
at the edge's source vertex.  Orientation is structural: values are stored
for the positive direction of each axis and negated for the reverse
traversal, so antisymmetry cannot fail.  The cocycle condition proper (zero
sum around closed circuits) is a property of the values and is checked by
verify_cocycle.

All values are quantized to the dyadic grid of step 2**-24.  Sums of a few
million such values stay exactly representable in double precision, so
circuit sums of honest cocycles come out exactly zero rather than merely
small, and the verifier can afford tolerances far below any genuine
violation.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

from ._patches import patch_rows
from .errors import CocycleError, InsufficientDataError
from .geometry import DelaunayData
from .symbolic import Alphabet, Configuration

__all__ = [
    "QUANT_STEP",
    "EdgeCocycle",
    "VertexWeight",
    "coboundary",
    "add_cocycles",
    "CocycleReport",
    "verify_cocycle",
    "DeformedPattern",
    "integrate",
    "path_agreement",
    "NondegeneracyReport",
    "nondegeneracy_check",
    "deformed_delaunay",
    "lattice_displacement",
]

QUANT_STEP = 2.0**-24


def _quantize(v) -> np.ndarray:
    return np.round(np.asarray(v, dtype=float) / QUANT_STEP) * QUANT_STEP


def _circuit_tol(length: int) -> float:
    # one rounding per edge value, half a grid step each, doubled for slack
    return max(1e-9 * length, length * QUANT_STEP)


@dataclass(frozen=True)
class EdgeCocycle:
    """Local rule for edge vectors: (axis, centered pattern) -> R^d.

    Exactly one of table / fn is set.  Table keys are (axis, pattern bytes)
    with the pattern flattened in row-major order; callables receive the
    axis and the (2R+1)-sided symbol cube around the source vertex.
    """

    dimension: int
    radius: int
    name: str
    alphabet: Alphabet | None = None
    table: Mapping | None = None
    fn: Callable | None = None

    def __post_init__(self):
        if (self.table is None) == (self.fn is None):
            raise ValueError("exactly one of table / fn must be given")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    def value(self, axis: int, pattern: np.ndarray) -> np.ndarray:
        pattern = np.asarray(pattern, dtype=np.uint8)
        if self.table is not None:
            key = (axis, pattern.tobytes())
            if key not in self.table:
                raise InsufficientDataError(
                    f"cocycle {self.name!r} has no value for axis {axis} at an observed pattern"
                )
            raw = self.table[key]
        else:
            raw = self.fn(axis, pattern)
        v = _quantize(raw).ravel()
        if v.shape != (self.dimension,):
            raise ValueError(f"cocycle value must lie in R^{self.dimension}")
        return v

    def edge_value(self, axis: int, pattern: np.ndarray, forward: bool = True) -> np.ndarray:
        v = self.value(axis, pattern)
        return v if forward else -v

    @classmethod
    def coordinate(cls, dimension: int) -> "EdgeCocycle":
        """The trivial cocycle sending each edge to its own displacement."""
        eye = np.eye(dimension)
        return cls(
            dimension=dimension,
            radius=0,
            name="coordinate",
            fn=lambda axis, pattern: eye[axis],
        )

    @classmethod
    def from_function(cls, config: Configuration, radius: int, fn, name: str) -> "EdgeCocycle":
        """Tabulate fn over every pattern observed in config."""
        d = config.dimension
        side = 2 * radius + 1
        if min(config.cells.shape) < side:
            raise InsufficientDataError("window smaller than the cocycle pattern")
        rows, _ = patch_rows(config.cells, side)
        table = {}
        shape = (side,) * d
        for row in np.unique(rows, axis=0):
            pat = row.reshape(shape)
            for axis in range(d):
                table[(axis, pat.tobytes())] = tuple(_quantize(fn(axis, pat)).ravel())
        return cls(
            dimension=d, radius=radius, name=name, alphabet=config.alphabet, table=table
        )


@dataclass(frozen=True)
class VertexWeight:
    """Local rule for vertex vectors: centered pattern -> R^d.

    Its coboundary (value at head minus value at tail) is a cocycle by
    construction, which is the standard way to make a nontrivial one."""

    dimension: int
    radius: int
    name: str
    alphabet: Alphabet | None = None
    table: Mapping | None = None
    fn: Callable | None = None

    def __post_init__(self):
        if (self.table is None) == (self.fn is None):
            raise ValueError("exactly one of table / fn must be given")

    def value(self, pattern: np.ndarray) -> np.ndarray:
        pattern = np.asarray(pattern, dtype=np.uint8)
        if self.table is not None:
            key = pattern.tobytes()
            if key not in self.table:
                raise InsufficientDataError(
                    f"vertex weight {self.name!r} has no value at an observed pattern"
                )
            raw = self.table[key]
        else:
            raw = self.fn(pattern)
        v = _quantize(raw).ravel()
        if v.shape != (self.dimension,):
            raise ValueError(f"weight value must lie in R^{self.dimension}")
        return v

    @classmethod
    def from_function(cls, config: Configuration, radius: int, fn, name: str) -> "VertexWeight":
        side = 2 * radius + 1
        if min(config.cells.shape) < side:
            raise InsufficientDataError("window smaller than the weight pattern")
        rows, _ = patch_rows(config.cells, side)
        shape = (side,) * config.dimension
        table = {
            row.tobytes(): tuple(_quantize(fn(row.reshape(shape))).ravel())
            for row in np.unique(rows, axis=0)
        }
        return cls(
            dimension=config.dimension,
            radius=radius,
            name=name,
            alphabet=config.alphabet,
            table=table,
        )


def _center_crop(pattern: np.ndarray, small: int, big: int) -> np.ndarray:
    if small == big:
        return pattern
    off = big - small
    idx = tuple(slice(off, off + 2 * small + 1) for _ in range(pattern.ndim))
    return pattern[idx]


def coboundary(weight: VertexWeight) -> EdgeCocycle:
    """Edge cocycle w(head) - w(tail); radius grows by one so a single
    centered pattern determines both endpoint windows."""
    r = weight.radius
    side = 2 * (r + 1) + 1

    def fn(axis, pattern):
        tail_idx = tuple(slice(1, side - 1) for _ in range(pattern.ndim))
        head_idx = list(tail_idx)
        head_idx[axis] = slice(2, side)
        return weight.value(pattern[tuple(head_idx)]) - weight.value(pattern[tail_idx])

    return EdgeCocycle(
        dimension=weight.dimension,
        radius=r + 1,
        name=f"d({weight.name})",
        alphabet=weight.alphabet,
        fn=fn,
    )


def add_cocycles(a: EdgeCocycle, b: EdgeCocycle, name: str | None = None) -> EdgeCocycle:
    """Pointwise sum; each summand reads its own centered subpattern."""
    if a.dimension != b.dimension:
        raise ValueError("cocycle dimensions differ")
    r = max(a.radius, b.radius)

    def fn(axis, pattern):
        return a.value(axis, _center_crop(pattern, a.radius, r)) + b.value(
            axis, _center_crop(pattern, b.radius, r)
        )

    return EdgeCocycle(
        dimension=a.dimension,
        radius=r,
        name=name or f"{a.name}+{b.name}",
        alphabet=a.alphabet or b.alphabet,
        fn=fn,
    )


def _edge_fields(config: Configuration, cocycle: EdgeCocycle):
    """Per-axis arrays of edge values over the interior vertex grid.

    Vertices are the cells whose centered (2R+1)-pattern fits in the
    window; grid index g corresponds to vertex g + R (per axis).  The entry
    fields[axis][g] is the value of the edge from that vertex toward the
    next one along the axis (the last slice along the axis has no such edge
    and is sliced away by the callers).
    """
    if config.dimension != cocycle.dimension:
        raise InsufficientDataError("cocycle and configuration dimensions differ")
    side = 2 * cocycle.radius + 1
    if min(config.cells.shape) < side + 1:
        raise InsufficientDataError("window too small to hold a single edge")
    rows, grid_shape = patch_rows(config.cells, side)
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    d = config.dimension
    pat_shape = (side,) * d
    fields = []
    for axis in range(d):
        per_uniq = np.array(
            [cocycle.value(axis, row.reshape(pat_shape)) for row in uniq]
        )
        fields.append(per_uniq[inverse].reshape(grid_shape + (d,)))
    return grid_shape, fields


@dataclass(frozen=True)
class CocycleReport:
    holds: bool
    dimension: int
    plaquettes_checked: int
    max_plaquette_defect: float
    rectangles_checked: int
    max_rectangle_defect: float
    worst_circuit: tuple | None


def verify_cocycle(
    config: Configuration,
    cocycle: EdgeCocycle,
    n_rectangles: int = 50,
    rng_seed: int = 0,
) -> CocycleReport:
    """Check that circuit sums vanish.

    d=2: every elementary plaquette in the window, then seeded random
    rectangle circuits as an independent route over longer loops.  d=1 has
    no circuits, so the condition holds vacuously and the report says so.
    """
    d = config.dimension
    if d == 1:
        return CocycleReport(
            holds=True,
            dimension=1,
            plaquettes_checked=0,
            max_plaquette_defect=0.0,
            rectangles_checked=0,
            max_rectangle_defect=0.0,
            worst_circuit=None,
        )
    grid_shape, (f0, f1) = _edge_fields(config, cocycle)
    g0, g1 = grid_shape
    if g0 < 2 or g1 < 2:
        raise InsufficientDataError("window too small to hold a plaquette")
    defect = f0[:-1, :-1] + f1[1:, :-1] - f0[:-1, 1:] - f1[:-1, :-1]
    per_cell = np.abs(defect).max(axis=-1)
    max_plaq = float(per_cell.max())
    plaq_ok = max_plaq <= _circuit_tol(4)
    worst = None
    if not plaq_ok:
        ij = np.unravel_index(int(per_cell.argmax()), per_cell.shape)
        worst = ("plaquette", (int(ij[0]), int(ij[1])))

    rng = np.random.default_rng(rng_seed)
    max_rect = 0.0
    rect_ok = True
    checked = 0
    for _ in range(n_rectangles):
        if g0 < 2 or g1 < 2:
            break
        i0, i1 = sorted(rng.choice(g0, size=2, replace=False))
        j0, j1 = sorted(rng.choice(g1, size=2, replace=False))
        length = 2 * (i1 - i0) + 2 * (j1 - j0)
        total = np.empty(d)
        for k in range(d):
            total[k] = math.fsum(
                [f0[i, j0, k] for i in range(i0, i1)]
                + [f1[i1, j, k] for j in range(j0, j1)]
                + [-f0[i, j1, k] for i in range(i0, i1)]
                + [-f1[i0, j, k] for j in range(j0, j1)]
            )
        defect_r = float(np.abs(total).max())
        max_rect = max(max_rect, defect_r)
        if defect_r > _circuit_tol(length):
            rect_ok = False
            if worst is None:
                worst = ("rectangle", (int(i0), int(j0), int(i1), int(j1)))
        checked += 1
    return CocycleReport(
        holds=plaq_ok and rect_ok,
        dimension=2,
        plaquettes_checked=int(per_cell.size),
        max_plaquette_defect=max_plaq,
        rectangles_checked=checked,
        max_rectangle_defect=max_rect,
        worst_circuit=worst,
    )


@dataclass(frozen=True)
class DeformedPattern:
    """Vertex positions obtained by integrating a cocycle over the window.

    The base vertex maps to the origin; vertices keep their symbol so the
    deformed pattern stays a decorated point set.
    """

    dimension: int
    base_vertex: tuple
    grid_origin: tuple
    grid_shape: tuple
    vertices: np.ndarray   # (N, d) int, absolute cell coordinates
    positions: np.ndarray  # (N, d) float
    symbols: np.ndarray    # (N,) uint8
    cocycle_name: str

    def position(self, vertex) -> np.ndarray:
        g = tuple(int(v) - o for v, o in zip(vertex, self.grid_origin))
        if any(not 0 <= gi < si for gi, si in zip(g, self.grid_shape)):
            raise KeyError(f"vertex {tuple(vertex)} outside the integrated grid")
        return self.positions[np.ravel_multi_index(g, self.grid_shape)]


def integrate(
    config: Configuration,
    cocycle: EdgeCocycle,
    base=None,
    report: CocycleReport | None = None,
    n_paths: int = 100,
    rng_seed: int = 1,
) -> DeformedPattern:
    """Integrate a verified cocycle to vertex positions.

    The potential is built along one deterministic spanning tree (axis 0
    first, then axis 1) and then re-checked against edge sums over random
    staircase paths; agreement is guaranteed for a cocycle, so any gap is
    reported as an error rather than absorbed.
    """
    if report is None:
        report = verify_cocycle(config, cocycle)
    if not report.holds:
        raise CocycleError("refusing to integrate: circuit sums do not vanish")
    d = config.dimension
    grid_shape, fields = _edge_fields(config, cocycle)
    lo = cocycle.radius
    if d == 1:
        (f0,) = fields
        (g0,) = grid_shape
        pos = np.zeros((g0, 1))
        pos[1:, 0] = np.cumsum(f0[:-1, 0])
        grid = pos.reshape(g0, 1)
    else:
        f0, f1 = fields
        g0, g1 = grid_shape
        grid = np.zeros((g0, g1, d))
        grid[1:, 0] = np.cumsum(f0[:-1, 0], axis=0)
        grid[:, 1:] = grid[:, :1] + np.cumsum(f1[:, :-1], axis=1)

    flat = grid.reshape(-1, d)
    gap, length = _worst_path_gap(grid_shape, fields, flat, rng_seed, n_paths)
    if gap > _circuit_tol(length + 1):
        raise CocycleError(
            f"tree integration disagrees with a path sum by {gap} over {length} edges"
        )

    if base is None:
        base_g = (0,) * d
    else:
        base_g = tuple(int(b) - lo for b in base)
        if any(not 0 <= g < s for g, s in zip(base_g, grid_shape)):
            raise InsufficientDataError(f"base vertex {base} outside the vertex grid")
    flat = flat - grid[base_g]
    mesh = np.meshgrid(*(np.arange(lo, lo + s) for s in grid_shape), indexing="ij")
    vertices = np.stack([g.ravel() for g in mesh], axis=1)
    symbols = config.cells[tuple(mesh)].ravel()
    return DeformedPattern(
        dimension=d,
        base_vertex=tuple(int(v) for v in vertices[np.ravel_multi_index(base_g, grid_shape)]),
        grid_origin=(lo,) * d,
        grid_shape=tuple(grid_shape),
        vertices=vertices,
        positions=flat,
        symbols=symbols,
        cocycle_name=cocycle.name,
    )


def _worst_path_gap(grid_shape, fields, flat_positions, rng_seed, n_paths):
    """Worst disagreement between tree-integrated positions and direct edge
    sums along random monotone staircase paths; returns (gap, path length)."""
    d = len(grid_shape)
    rng = np.random.default_rng(rng_seed)
    worst = (0.0, 1)
    for _ in range(n_paths):
        u = tuple(int(rng.integers(0, s)) for s in grid_shape)
        v = tuple(int(rng.integers(0, s)) for s in grid_shape)
        moves = []
        for axis in range(d):
            step = 1 if v[axis] >= u[axis] else -1
            moves.extend([(axis, step)] * abs(v[axis] - u[axis]))
        rng.shuffle(moves)
        terms = [[] for _ in range(d)]
        cur = list(u)
        for axis, step in moves:
            src = list(cur)
            if step < 0:
                src[axis] -= 1
            val = fields[axis][tuple(src)]
            for k in range(d):
                terms[k].append(step * val[k])
            cur[axis] += step
        total = np.array([math.fsum(t) for t in terms])
        fu = flat_positions[np.ravel_multi_index(u, grid_shape)]
        fv = flat_positions[np.ravel_multi_index(v, grid_shape)]
        gap = float(np.abs((fv - fu) - total).max())
        if gap > worst[0]:
            worst = (gap, max(len(moves), 1))
    return worst


def path_agreement(
    config: Configuration,
    cocycle: EdgeCocycle,
    pattern: DeformedPattern,
    n_paths: int = 100,
    rng_seed: int = 1,
) -> float:
    """Worst |F(v) - F(u) - path sum| over random staircase paths.

    Exactly zero for cocycles on the dyadic value grid; used to audit an
    integration independently of the spanning tree that produced it."""
    grid_shape, fields = _edge_fields(config, cocycle)
    if tuple(grid_shape) != tuple(pattern.grid_shape):
        raise InsufficientDataError("pattern was not integrated from this configuration")
    gap, _ = _worst_path_gap(grid_shape, fields, pattern.positions, rng_seed, n_paths)
    return gap


@dataclass(frozen=True)
class NondegeneracyReport:
    holds: bool
    dimension: int
    cells_checked: int
    failing_cells: int
    first_failing: tuple | None
    min_area: float
    min_turn: float
    min_edge_align: float


def nondegeneracy_check(pattern: DeformedPattern) -> NondegeneracyReport:
    """Every unit cell must map to a non-degenerate cell of the same
    orientation.

    Same orientation is read edge-wise: the image of each cell edge keeps a
    positive component along its source axis, so no edge is reversed and
    vertex rows stay ordered (this is what rules out f(e) = -e, whose image
    cells are rotated by a half turn and would pass a bare signed-area
    test).  Non-degeneracy for d=2 additionally asks the image quad, read
    in positive cyclic order, to be strictly convex with positive area;
    d=1 reduces to strictly increasing positions.
    """
    d = pattern.dimension
    grid = pattern.positions.reshape(pattern.grid_shape + (d,))
    if d == 1:
        gaps = np.diff(grid[:, 0])
        if gaps.size == 0:
            raise InsufficientDataError("need at least two vertices")
        bad = gaps <= 0
        first = (int(np.argmax(bad)),) if bad.any() else None
        return NondegeneracyReport(
            holds=not bool(bad.any()),
            dimension=1,
            cells_checked=int(gaps.size),
            failing_cells=int(bad.sum()),
            first_failing=first,
            min_area=math.nan,
            min_turn=math.nan,
            min_edge_align=float(gaps.min()),
        )
    a = grid[:-1, :-1]
    b = grid[1:, :-1]
    c = grid[1:, 1:]
    e = grid[:-1, 1:]
    if a.size == 0:
        raise InsufficientDataError("need at least one unit cell")

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    area = 0.5 * (cross(a, b) + cross(b, c) + cross(c, e) + cross(e, a))
    quads = [a, b, c, e]
    turns = []
    for k in range(4):
        p, q, r = quads[k], quads[(k + 1) % 4], quads[(k + 2) % 4]
        turns.append(cross(q - p, r - q))
    turns = np.stack(turns, axis=-1)
    align = np.stack(
        [
            (b - a)[..., 0],
            (c - e)[..., 0],
            (e - a)[..., 1],
            (c - b)[..., 1],
        ],
        axis=-1,
    )
    bad = (area <= 0) | (turns <= 0).any(axis=-1) | (align <= 0).any(axis=-1)
    first = None
    if bad.any():
        ij = np.unravel_index(int(np.argmax(bad)), bad.shape)
        first = (int(ij[0]), int(ij[1]))
    return NondegeneracyReport(
        holds=not bool(bad.any()),
        dimension=2,
        cells_checked=int(area.size),
        failing_cells=int(bad.sum()),
        first_failing=first,
        min_area=float(area.min()),
        min_turn=float(turns.min()),
        min_edge_align=float(align.min()),
    )


def deformed_delaunay(pattern: DeformedPattern, window=None) -> DelaunayData:
    """Discreteness and covering radii of the deformed vertex set."""
    return DelaunayData.measure(pattern.positions, window)


def lattice_displacement(pattern: DeformedPattern) -> float:
    """Sup of |position - lattice offset| over the vertices: how far the
    deformation strays from the identity embedding."""
    ref = pattern.vertices.astype(float) - np.asarray(pattern.base_vertex, dtype=float)
    return float(np.linalg.norm(pattern.positions - ref, axis=1).max())
