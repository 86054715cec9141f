"""Delaunay sets, jump paths, triangulations, and piecewise-affine maps.

Everything in this module measures lengths with the Euclidean norm; the
lattice modules use chess (max) distance, and conversion happens explicitly
at the call sites that bridge the two (a marked cell set enters here as its
integer coordinates read as points of R^d).

A Delaunay set is uniformly discrete at scale m (no two points closer than
m) and relatively dense at scale R (every window point has a point of the
set within R).  The jump construction moves a point of the set toward a
target by at least R per step while never jumping farther than 3R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay as _SciDelaunay
from scipy.spatial import QhullError, cKDTree

from .errors import CapacityError, DegenerateGeometryError

__all__ = [
    "DelaunayData",
    "delaunay_radii",
    "jump_step",
    "jump_path",
    "ReturnPath",
    "Triangulation",
    "delaunay_triangulate",
    "PAMap",
    "pa_extend",
    "EnvelopeFit",
    "growth_envelope",
]

_SAMPLE_CAP = 4_000_000
ENVELOPE_GRID_STEP = 2.0**-7
_ENVELOPE_GRID_MAX = 64.0


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] not in (1, 2):
        raise DegenerateGeometryError(f"expected (N, 1) or (N, 2) points, got {pts.shape}")
    return pts


@dataclass(frozen=True)
class DelaunayData:
    """Point set with its discreteness radius m and covering radius R.

    Use measure() to compute the radii; from_bounds() accepts radii the
    caller can justify by construction (any upper bound on the true covering
    radius keeps the jump guarantees valid).
    """

    dimension: int
    points: np.ndarray
    window: tuple
    m: float
    R: float
    pitch: float | None = None

    @classmethod
    def measure(cls, points, window=None) -> "DelaunayData":
        pts = _as_points(points)
        if len(pts) < 1:
            raise DegenerateGeometryError("need at least one point")
        if window is None:
            lo, hi = pts.min(axis=0), pts.max(axis=0)
        else:
            lo = np.asarray(window[0], dtype=float).ravel()
            hi = np.asarray(window[1], dtype=float).ravel()
        if len(pts) >= 2:
            tree = cKDTree(pts)
            dd, _ = tree.query(pts, k=2)
            m = float(dd[:, 1].min())
            if m <= 0:
                raise DegenerateGeometryError("duplicate points (m = 0)")
            pitch = m / 8.0
        else:
            tree = cKDTree(pts)
            m = math.inf
            span = float(min(hi - lo)) if np.any(hi > lo) else 1.0
            pitch = span / 64.0
        axes = []
        total = 1
        for a in range(pts.shape[1]):
            n = max(2, int(math.floor((hi[a] - lo[a]) / pitch)) + 1) if hi[a] > lo[a] else 1
            total *= n
            axes.append(np.linspace(lo[a], hi[a], n))
        if total > _SAMPLE_CAP:
            raise CapacityError(f"covering-radius grid would need {total} samples")
        mesh = np.meshgrid(*axes, indexing="ij")
        samples = np.stack([g.ravel() for g in mesh], axis=1)
        dist, _ = tree.query(samples)
        R = float(dist.max())
        return cls(
            dimension=pts.shape[1],
            points=pts,
            window=(lo, hi),
            m=m,
            R=R,
            pitch=pitch,
        )

    @classmethod
    def from_bounds(cls, points, window, m: float, R: float) -> "DelaunayData":
        pts = _as_points(points)
        lo = np.asarray(window[0], dtype=float).ravel()
        hi = np.asarray(window[1], dtype=float).ravel()
        return cls(dimension=pts.shape[1], points=pts, window=(lo, hi), m=m, R=R)

    def is_relatively_dense(self, cap: float) -> bool:
        return self.R <= cap


def delaunay_radii(points, window=None) -> tuple[float, float]:
    """(m, R) of a point set over a window (defaults to the bounding box)."""
    data = DelaunayData.measure(points, window)
    return data.m, data.R


def _nearest_lex(points: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Nearest point to z; exact ties broken toward the lexicographically
    smallest coordinate tuple."""
    d = np.linalg.norm(points - z, axis=1)
    dmin = d.min()
    cand = points[d <= dmin + 1e-12]
    order = np.lexsort(tuple(cand[:, a] for a in reversed(range(cand.shape[1]))))
    return cand[order[0]].copy()


def jump_step(data: DelaunayData, x, y) -> np.ndarray:
    """One jump of x toward y through the point set.

    Preconditions: x belongs to the set and |x - y| >= 2R.  The returned
    point x' satisfies |x' - x| <= 3R and |x' - y| <= |x - y| - R; a failure
    of those bounds means the set is not R-dense where the jump landed, and
    is reported as an error.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    pts = data.points
    if np.linalg.norm(pts - x, axis=1).min() > 1e-9:
        raise DegenerateGeometryError("jump origin is not a point of the set")
    gap = np.linalg.norm(x - y)
    if gap < 2 * data.R:
        raise DegenerateGeometryError(
            f"jump needs |x - y| >= 2R = {2 * data.R}, have {gap}"
        )
    z = x - 2 * data.R * (x - y) / gap
    xp = _nearest_lex(pts, z)
    if np.linalg.norm(xp - x) > 3 * data.R + 1e-9:
        raise DegenerateGeometryError("jump exceeded 3R: set not R-dense near target")
    if np.linalg.norm(xp - y) > gap - data.R + 1e-9:
        raise DegenerateGeometryError("jump did not gain R: set not R-dense near target")
    return xp


@dataclass(frozen=True)
class ReturnPath:
    waypoints: np.ndarray  # (k+1, d); waypoints[0] is the start
    R: float

    @property
    def length(self) -> int:
        return len(self.waypoints) - 1

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.waypoints, axis=0)

    @property
    def step_bound(self) -> float:
        return 3 * self.R


def jump_path(data: DelaunayData, x, y) -> ReturnPath:
    """Iterate jump_step until within 2R of the target.

    The number of steps is at most ceil(|x - y| / R) and each waypoint is a
    point of the set.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    start_gap = np.linalg.norm(x - y)
    bound = math.ceil(start_gap / data.R) + 1
    waypoints = [x.copy()]
    current = x
    while np.linalg.norm(current - y) >= 2 * data.R:
        current = jump_step(data, current, y)
        waypoints.append(current)
        if len(waypoints) > bound:
            raise AssertionError("jump path exceeded its step bound")
    return ReturnPath(waypoints=np.array(waypoints), R=data.R)


# --- triangulation ---------------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    """Simplices over a canonically ordered (lexicographically sorted) copy
    of the input points, so the simplex set is a function of the point set
    alone, not of input order."""

    dimension: int
    points: np.ndarray
    simplices: np.ndarray  # (M, d+1), rows sorted internally and between rows

    def edges(self) -> set:
        out = set()
        for s in self.simplices:
            k = len(s)
            for i in range(k):
                for j in range(i + 1, k):
                    out.add((int(s[i]), int(s[j])))
        return out


def _incircle(pts, a, b, c, d) -> float:
    """Positive when d is strictly inside the circumcircle of CCW (a, b, c)."""
    pa, pb, pc, pd = pts[a], pts[b], pts[c], pts[d]
    if _orient(pa, pb, pc) < 0:
        pb, pc = pc, pb
    m = np.array(
        [
            [pa[0] - pd[0], pa[1] - pd[1], (pa[0] - pd[0]) ** 2 + (pa[1] - pd[1]) ** 2],
            [pb[0] - pd[0], pb[1] - pd[1], (pb[0] - pd[0]) ** 2 + (pb[1] - pd[1]) ** 2],
            [pc[0] - pd[0], pc[1] - pd[1], (pc[0] - pd[0]) ** 2 + (pc[1] - pd[1]) ** 2],
        ]
    )
    return float(np.linalg.det(m))


def _incircle_tol(pts, a, b, c, d) -> float:
    s = max(1.0, float(np.abs(pts[[a, b, c, d]]).max()))
    return 1e-9 * s**4


def _orient(pa, pb, pc) -> float:
    return float((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]))


def _canonical_flips(pts: np.ndarray, tris: set) -> set:
    """Re-flip cocircular quadruples so the kept diagonal is the
    lexicographically smallest; terminates because each flip replaces an
    edge by a strictly smaller one."""

    def diag_key(i, j):
        return tuple(sorted((tuple(pts[i]), tuple(pts[j]))))

    changed = True
    guard = 0
    while changed:
        changed = False
        guard += 1
        if guard > 4 * max(len(tris), 1):
            raise AssertionError("cocircular canonicalization did not stabilize")
        edge_map: dict[tuple, list] = {}
        for t in sorted(tris):
            for i in range(3):
                e = tuple(sorted((t[i], t[(i + 1) % 3])))
                edge_map.setdefault(e, []).append(t)
        for e in sorted(edge_map, key=lambda e: diag_key(*e)):
            ts = edge_map[e]
            if len(ts) != 2 or not all(t in tris for t in ts):
                continue
            a, b = e
            c = next(v for v in ts[0] if v not in e)
            d = next(v for v in ts[1] if v not in e)
            det = _incircle(pts, a, b, c, int(d))
            if abs(det) > _incircle_tol(pts, a, b, c, d):
                continue
            if diag_key(c, d) < diag_key(a, b):
                if _orient(pts[c], pts[d], pts[a]) == 0 or _orient(pts[c], pts[d], pts[b]) == 0:
                    continue
                tris.discard(ts[0])
                tris.discard(ts[1])
                tris.add(tuple(sorted((c, d, a))))
                tris.add(tuple(sorted((c, d, b))))
                changed = True
    return tris


def delaunay_triangulate(data_or_points) -> Triangulation:
    """Delaunay triangulation with a deterministic cocircular tie-break.

    d=1: consecutive pairs of the sorted points.  d=2: Delaunay up to
    cocircularity, with every cocircular quadruple split along its
    lexicographically smallest diagonal.
    """
    pts = data_or_points.points if isinstance(data_or_points, DelaunayData) else _as_points(data_or_points)
    d = pts.shape[1]
    if len(pts) < d + 1:
        raise DegenerateGeometryError(
            f"need at least {d + 1} points in dimension {d}, got {len(pts)}"
        )
    order = np.lexsort(tuple(pts[:, a] for a in reversed(range(d))))
    spts = np.ascontiguousarray(pts[order])
    if len(np.unique(spts, axis=0)) != len(spts):
        raise DegenerateGeometryError("duplicate points")
    if d == 1:
        simplices = np.array([[i, i + 1] for i in range(len(spts) - 1)], dtype=np.int64)
        return Triangulation(dimension=1, points=spts, simplices=simplices)
    try:
        sci = _SciDelaunay(spts)
    except QhullError as exc:
        raise DegenerateGeometryError(f"degenerate point set: {exc}") from None
    if sci.coplanar.size:
        raise DegenerateGeometryError("triangulation dropped input points")
    tris = {tuple(sorted(int(v) for v in s)) for s in sci.simplices}
    tris = _canonical_flips(spts, tris)
    simplices = np.array(sorted(tris), dtype=np.int64)
    return Triangulation(dimension=2, points=spts, simplices=simplices)


# --- piecewise-affine extension --------------------------------------------


@dataclass(frozen=True)
class PAMap:
    """Barycentric extension of a vertex map: affine on each simplex,
    continuous across shared faces."""

    triangulation: Triangulation
    vertex_images: np.ndarray
    matrices: np.ndarray   # (M, d_out, d_in)
    offsets: np.ndarray    # (M, d_out)
    lipschitz: float
    orientations: np.ndarray  # per-simplex sign of det (square case)

    def locate(self, x) -> int:
        """Index of the first (in canonical order) simplex containing x."""
        x = np.asarray(x, dtype=float).ravel()
        tri = self.triangulation
        pts = tri.points
        v0 = pts[tri.simplices[:, 0]]
        vmat = np.stack(
            [pts[tri.simplices[:, k]] - v0 for k in range(1, tri.dimension + 1)],
            axis=2,
        )
        lam = np.linalg.solve(vmat, (x - v0)[:, :, None])[:, :, 0]
        ok = (lam >= -1e-9).all(axis=1) & (lam.sum(axis=1) <= 1 + 1e-9)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            raise DegenerateGeometryError(f"point {x} outside the triangulated domain")
        return int(hits[0])

    def evaluate(self, x) -> np.ndarray:
        k = self.locate(x)
        x = np.asarray(x, dtype=float).ravel()
        return self.matrices[k] @ x + self.offsets[k]


def pa_extend(tri: Triangulation, vertex_images) -> PAMap:
    """Affine-per-simplex extension of the vertex images.

    The Lipschitz constant is the largest per-simplex operator norm (the
    spectral norm is exact in these dimensions); each square-matrix simplex
    also carries the sign of its determinant as an orientation flag.
    """
    images = np.asarray(vertex_images, dtype=float)
    if images.ndim == 1:
        images = images[:, None]
    if len(images) != len(tri.points):
        raise DegenerateGeometryError("one image per vertex required")
    pts = tri.points
    mats, offs, orients = [], [], []
    lip = 0.0
    for s in tri.simplices:
        v0 = pts[s[0]]
        w0 = images[s[0]]
        vmat = (pts[s[1:]] - v0).T
        wmat = (images[s[1:]] - w0).T
        scale = max(1.0, float(np.abs(vmat).max()))
        if abs(np.linalg.det(vmat)) <= 1e-12 * scale ** vmat.shape[0]:
            raise DegenerateGeometryError(
                f"degenerate source simplex {tuple(int(v) for v in s)}"
            )
        a = wmat @ np.linalg.inv(vmat)
        mats.append(a)
        offs.append(w0 - a @ v0)
        lip = max(lip, float(np.linalg.norm(a, 2)))
        orients.append(int(np.sign(np.linalg.det(a))) if a.shape[0] == a.shape[1] else 0)
    return PAMap(
        triangulation=tri,
        vertex_images=images,
        matrices=np.array(mats),
        offsets=np.array(offs),
        lipschitz=lip,
        orientations=np.array(orients, dtype=np.int64),
    )


# --- growth envelope --------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeFit:
    M: float
    C: float
    grid_step: float = ENVELOPE_GRID_STEP


def growth_envelope(xs, ys) -> EnvelopeFit:
    """Smallest dyadic-grid slope M whose intercept C = max(|y| - M|x|, 0)
    is minimal: |y_i| <= M |x_i| + C for every sample, with the least C
    first and the least M attaining it."""
    xs = _as_points(xs)
    ys = _as_points(ys)
    if len(xs) != len(ys) or len(xs) == 0:
        raise DegenerateGeometryError("need matching nonempty sample arrays")
    nx = np.linalg.norm(xs, axis=1)
    ny = np.linalg.norm(ys, axis=1)
    grid = np.arange(0.0, _ENVELOPE_GRID_MAX + ENVELOPE_GRID_STEP, ENVELOPE_GRID_STEP)
    c_of = np.empty(len(grid))
    for i, m in enumerate(grid):
        c_of[i] = max(0.0, float((ny - m * nx).max()))
    c_min = c_of.min()
    idx = int(np.argmax(c_of <= c_min + 1e-12))
    return EnvelopeFit(M=float(grid[idx]), C=float(c_of[idx]))
