"""Bundled certification suites over the packaged fixture rules.

Each suite runs a fixed list of checks and returns a JSON-ready report:
{"suite", "seed", "passed", "checks": [{"name", "passed", ...}]}.  Reports
contain no timing or machine-specific data, so a given seed always produces
byte-identical output.
"""

from __future__ import annotations

import math
from importlib import resources

import numpy as np

from . import formats
from .counting import check_equivalence, complexity
from .deformation import (
    EdgeCocycle,
    VertexWeight,
    add_cocycles,
    coboundary,
    integrate,
    lattice_displacement,
    nondegeneracy_check,
    path_agreement,
    verify_cocycle,
)
from .derivation import BlockCode, PointingRule, apply_code, apply_pointing, mld_check
from .errors import FixtureError, FormatError
from .geometry import (
    DelaunayData,
    delaunay_triangulate,
    growth_envelope,
    jump_path,
    pa_extend,
)
from .recurrence import (
    linear_repetitivity_check,
    repetitivity,
    repetitivity_equivalence,
)
from .symbolic import Alphabet, SubstitutionRule, certify_language, expand

SUITES = ("transversal", "mld", "repetitivity", "geometry", "deformation")

__all__ = ["SUITES", "run_suite", "fixture_rule"]


def fixture_rule(name: str) -> SubstitutionRule:
    ref = resources.files("aperiodic_lab") / "fixtures" / f"{name}.json"
    if not ref.is_file():
        raise FixtureError(f"bundled fixture {name}.json is missing")
    with resources.as_file(ref) as path:
        return formats.load_rule(path)


def run_suite(name: str, seed: int = 0) -> dict:
    try:
        fn = _SUITE_FNS[name]
    except KeyError:
        raise FormatError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    checks = fn(seed)
    return {
        "suite": name,
        "seed": seed,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def _check(name: str, passed: bool, **details) -> dict:
    out = {"name": name, "passed": bool(passed)}
    out.update(details)
    return out


# --- transversal: complexity does not depend on the pointing rule ----------


def _suite_transversal(seed: int) -> list:
    tm = fixture_rule("thue_morse")
    w = expand(tm, "0", 14)
    certify_language(tm, w, 34)
    checks = []
    marks = {}
    for sym in ("0", "1"):
        rule = PointingRule.mark_symbol(tm.alphabet, sym)
        marked = apply_pointing(w, rule)
        marks[sym] = complexity(w, 29, pointing=rule)
        checks.append(
            _check(
                f"mark-{sym} relatively dense with gap <= 4",
                marked.covering <= 4,
                covering=int(marked.covering),
                n_marks=int(marked.n_marks),
            )
        )
    for a, b in (("0", "1"), ("1", "0")):
        wit = check_equivalence(marks[a], marks[b], (5, 25), form="additive")
        small = wit.constants["a"] <= 4 and wit.constants["b"] <= 4
        checks.append(
            _check(
                f"additive witness mark-{a} vs mark-{b}, shifts <= 4",
                wit.passed and small,
                witness=wit.to_json_dict(),
            )
        )
    return checks


# --- mld: complexity equivalence under an invertible recode -----------------


def _two_gram_code(config) -> tuple[BlockCode, BlockCode]:
    alpha = config.alphabet
    pairs = sorted(
        {
            alpha.symbols[config.cells[i]] + alpha.symbols[config.cells[i + 1]]
            for i in range(len(config.cells) - 1)
        }
    )
    out = Alphabet(tuple(pairs))
    code = BlockCode.from_function(
        config,
        1,
        lambda pat: alpha.symbols[pat[1]] + alpha.symbols[pat[2]],
        out,
        "two-gram",
    )
    recoded = apply_code(config, code)
    back = BlockCode.from_function(
        recoded, 0, lambda pat: out.symbols[pat[0]][0], alpha, "first-letter"
    )
    return code, back


def _suite_mld(seed: int) -> list:
    fib = fixture_rule("fibonacci")
    w = expand(fib, "a", 17)
    certify_language(fib, w, 34)
    code, back = _two_gram_code(w)
    rep = mld_check(w, code, back)
    checks = [
        _check(
            "two-gram recode is invertible (MLD)",
            rep.mld,
            total_radius=rep.total_radius,
        )
    ]
    recoded = apply_code(w, code)
    p = complexity(w, 29)
    q = complexity(recoded, 29)
    wit = check_equivalence(q, p, (5, 25), form="additive")
    checks.append(
        _check(
            "additive witness recode vs original, shifts <= 2",
            wit.passed and wit.constants["a"] <= 2 and wit.constants["b"] <= 2,
            witness=wit.to_json_dict(),
        )
    )
    collapse = BlockCode.from_function(
        w, 0, lambda pat: "a", Alphabet(("a",)), "collapse"
    )
    inverse_guess = BlockCode.from_function(
        apply_code(w, collapse), 0, lambda pat: "a", fib.alphabet, "guess"
    )
    rep2 = mld_check(w, collapse, inverse_guess)
    checks.append(
        _check(
            "collapse code detected as non-MLD with a witness cell",
            (not rep2.mld) and rep2.failing_cell is not None,
            failing_cell=list(rep2.failing_cell) if rep2.failing_cell else None,
        )
    )
    return checks


# --- repetitivity ------------------------------------------------------------


def _suite_repetitivity(seed: int) -> list:
    checks = []
    per = fixture_rule("periodic_ab")
    wp = expand(per, "a", 10)
    certify_language(per, wp, 28)
    rp = repetitivity(wp, 20)
    vals = {r: rp.value(r) for r in rp.certified_rs()}
    checks.append(
        _check(
            "periodic word has R(n) = 1 on all certified n",
            bool(vals) and all(v == 1 for v in vals.values()),
            certified_n=sorted(vals),
        )
    )
    fib = fixture_rule("fibonacci")
    w = expand(fib, "a", 17)
    certify_language(fib, w, 34)
    rf = repetitivity(w, 25)
    ratios = {r: rf.value(r) / r for r in rf.certified_rs() if 2 <= r <= 25}
    checks.append(
        _check(
            "R(r)/r within [0.5, 6] over r in [2, 25]",
            len(ratios) == 24 and all(0.5 <= v <= 6 for v in ratios.values()),
            min_ratio=min(ratios.values()),
            max_ratio=max(ratios.values()),
        )
    )
    lr = linear_repetitivity_check(rf)
    checks.append(
        _check(
            "linear-repetitivity trend consistent",
            lr.lr_consistent,
            lambda_hat=lr.lambda_hat,
            quartile_slope=lr.quartile_slope,
        )
    )
    code, _ = _two_gram_code(w)
    recoded = apply_code(w, code)
    rq = repetitivity(recoded, 25)
    wit = repetitivity_equivalence(rq, rf, (5, 20), form="multiplicative")
    checks.append(
        _check(
            "multiplicative witness between R series of recode and original",
            wit.passed,
            witness=wit.to_json_dict(),
        )
    )
    return checks


# --- geometry ----------------------------------------------------------------


def _jittered_instance(rng) -> DelaunayData:
    """Jittered grid over [0, 50]^2 with a covering radius valid by
    construction: every plane point is within half a grid diagonal of an
    unjittered site, which itself moved by at most the jitter diagonal."""
    h = float(rng.uniform(1.5, 4.0))
    jitter = 0.3 * h
    ax = np.arange(0.0, 50.0 + 1e-9, h)
    gx, gy = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    pts = pts + rng.uniform(-jitter, jitter, size=pts.shape)
    r_hat = math.sqrt(2.0) * (h / 2.0 + jitter)
    m_hat = max(h - 2.0 * jitter * math.sqrt(2.0), 1e-6)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    return DelaunayData.from_bounds(pts, (lo, hi), m_hat, r_hat)


def _suite_geometry(seed: int) -> list:
    rng = np.random.default_rng(seed)
    trials = 1000
    jump_ok = 0
    length_ok = 0
    for _ in range(trials):
        data = _jittered_instance(rng)
        pts = data.points
        x = pts[int(rng.integers(0, len(pts)))]
        corners = np.array([(0, 0), (0, 50), (50, 0), (50, 50)], dtype=float)
        far = corners[int(np.argmax(np.linalg.norm(corners - x, axis=1)))]
        span = float(np.linalg.norm(far - x))
        length = float(rng.uniform(2 * data.R, span))
        y = x + (far - x) * (length / span)
        path = jump_path(data, x, y)  # raises if either jump bound fails
        jump_ok += 1
        if path.length <= math.ceil(np.linalg.norm(x - y) / data.R):
            length_ok += 1
    checks = [
        _check(
            "jump bounds |x'-x| <= 3R and gap shrink >= R on every trial",
            jump_ok == trials,
            trials=trials,
        ),
        _check(
            "path length <= ceil(|x-y| / R) on every trial",
            length_ok == trials,
            trials=trials,
        ),
    ]
    spot = np.random.default_rng(seed + 1)
    bounds_ok = True
    for _ in range(5):
        data = _jittered_instance(spot)
        measured = DelaunayData.measure(data.points, data.window)
        if measured.R > data.R + 1e-9 or measured.m < data.m - 1e-9:
            bounds_ok = False
    checks.append(
        _check("constructed radii bound the measured radii (5 spot checks)", bounds_ok)
    )

    base = np.array([(i, j) for i in range(7) for j in range(7)], dtype=float)
    grid = base + np.random.default_rng(seed + 2).uniform(-0.25, 0.25, size=base.shape)
    tri = delaunay_triangulate(grid)
    ident = pa_extend(tri, tri.points.copy())
    checks.append(
        _check(
            "identity vertex map has Lipschitz constant 1",
            abs(ident.lipschitz - 1.0) <= 1e-9,
            lipschitz=ident.lipschitz,
        )
    )
    doubled = pa_extend(tri, 2.0 * tri.points)
    checks.append(
        _check(
            "doubling vertex map has Lipschitz constant 2",
            abs(doubled.lipschitz - 2.0) <= 1e-9,
            lipschitz=doubled.lipschitz,
        )
    )

    shear = np.array([[1.0, 0.3], [0.0, 1.0]])
    noise = np.random.default_rng(seed + 3)
    images = tri.points @ shear.T + noise.uniform(-0.05, 0.05, size=tri.points.shape)
    pam = pa_extend(tri, images)
    pair_rng = np.random.default_rng(seed + 4)
    pairs_ok = 0
    n_pairs = 1000
    for _ in range(n_pairs):
        sa, sb = pair_rng.integers(0, len(tri.simplices), size=2)
        la = pair_rng.dirichlet(np.ones(3))
        lb = pair_rng.dirichlet(np.ones(3))
        xa = la @ tri.points[tri.simplices[sa]]
        xb = lb @ tri.points[tri.simplices[sb]]
        fa, fb = pam.evaluate(xa), pam.evaluate(xb)
        if np.linalg.norm(fa - fb) <= pam.lipschitz * np.linalg.norm(xa - xb) + 1e-9:
            pairs_ok += 1
    checks.append(
        _check(
            "two-point Lipschitz inequality on 1000 sampled pairs",
            pairs_ok == n_pairs,
            lipschitz=pam.lipschitz,
        )
    )

    center = int(np.argmin(np.linalg.norm(tri.points - np.array([3.0, 3.0]), axis=1)))
    host = next(s for s in tri.simplices if center in s)
    others = [v for v in host if v != center]
    u, v = tri.points[others[0]], tri.points[others[1]]
    direction = (v - u) / np.linalg.norm(v - u)
    p = tri.points[center]
    mirrored = 2 * (u + direction * float((p - u) @ direction)) - p
    reflected = tri.points.copy()
    reflected[center] = mirrored
    flagged = pa_extend(tri, reflected)
    checks.append(
        _check(
            "reflecting one interior vertex flags a negative orientation",
            bool((flagged.orientations < 0).any()),
            negative_simplices=int((flagged.orientations < 0).sum()),
        )
    )

    env_rng = np.random.default_rng(seed + 5)
    xs = env_rng.uniform(-8, 8, size=(300, 2))
    xs[0] = 0.0
    slope, intercept = 1.5, 0.375
    norms = np.linalg.norm(xs, axis=1)
    dirs = np.where(norms[:, None] > 0, xs / np.where(norms == 0, 1, norms)[:, None], 0.0)
    ys = dirs * (slope * norms + intercept)[:, None]
    ys[0] = np.array([intercept, 0.0])
    fit = growth_envelope(xs, ys)
    checks.append(
        _check(
            "growth envelope recovers the affine bound",
            abs(fit.M - slope) <= fit.grid_step and abs(fit.C - intercept) <= 1e-6,
            M=fit.M,
            C=fit.C,
        )
    )
    return checks


# --- deformation --------------------------------------------------------------


def _suite_deformation(seed: int) -> list:
    tm2 = fixture_rule("thue_morse_2d")
    c = expand(tm2, "0", 5)
    coord = EdgeCocycle.coordinate(2)

    def bump(pat):
        s = 1.0 if int(pat.ravel()[0]) == 0 else -1.0
        return [0.125 * s, -0.125 * s]

    weight = VertexWeight.from_function(c, 0, bump, "bump")
    cob = coboundary(weight)
    rep = verify_cocycle(c, cob, rng_seed=seed)
    checks = [
        _check(
            "coboundary circuit sums are exactly zero",
            rep.holds
            and rep.max_plaquette_defect == 0.0
            and rep.max_rectangle_defect == 0.0,
            plaquettes=rep.plaquettes_checked,
            rectangles=rep.rectangles_checked,
        )
    ]

    rng = np.random.default_rng(seed)
    bad = EdgeCocycle.from_function(
        c, 0, lambda axis, pat: rng.uniform(-1.0, 1.0, size=2), "random-table"
    )
    rep_bad = verify_cocycle(c, bad, rng_seed=seed)
    checks.append(
        _check(
            "random table rejected with a nonzero elementary-square residual",
            (not rep_bad.holds) and rep_bad.max_plaquette_defect > 0,
            residual=rep_bad.max_plaquette_defect,
        )
    )

    deform = add_cocycles(coord, cob)
    pattern = integrate(c, deform, rng_seed=seed + 1)
    gap = path_agreement(c, deform, pattern, n_paths=100, rng_seed=seed + 2)
    checks.append(
        _check(
            "tree integration agrees with 100 random paths within 1e-9",
            gap <= 1e-9,
            worst_gap=gap,
        )
    )
    nd = nondegeneracy_check(pattern)
    checks.append(
        _check(
            "perturbed identity stays non-degenerate",
            nd.holds,
            min_area=nd.min_area,
            displacement=lattice_displacement(pattern),
        )
    )

    neg = EdgeCocycle(
        dimension=2, radius=0, name="negate", fn=lambda axis, pat: -np.eye(2)[axis]
    )
    nd_neg = nondegeneracy_check(integrate(c, neg, rng_seed=seed + 3))
    checks.append(
        _check(
            "edge reversal fails non-degeneracy on every cell",
            (not nd_neg.holds) and nd_neg.failing_cells == nd_neg.cells_checked,
            failing=nd_neg.failing_cells,
            cells=nd_neg.cells_checked,
        )
    )
    return checks


_SUITE_FNS = {
    "transversal": _suite_transversal,
    "mld": _suite_mld,
    "repetitivity": _suite_repetitivity,
    "geometry": _suite_geometry,
    "deformation": _suite_deformation,
}
