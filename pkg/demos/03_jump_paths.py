"""Jump steps through a Delaunay set: bounded hops that always gain ground.

Given a point set that is R-dense in its window, one jump from a set point x
toward a target y lands on another set point at most 3R away while closing
the gap to y by at least R.  Iterating gives a path of at most
ceil(|x - y| / R) hops.  The script measures (m, R) for a jittered grid and
walks a few paths.
"""

import itertools

import numpy as np

from aperiodic_lab import DelaunayData, jump_path, jump_step


def jittered_grid(rng, h, jitter, extent):
    n = int(extent / h) + 1
    base = np.array(list(itertools.product(range(n), range(n))), dtype=float) * h
    return base + rng.uniform(-jitter, jitter, size=base.shape)


def main():
    rng = np.random.default_rng(42)
    h, jitter = 2.5, 0.75
    pts = jittered_grid(rng, h, jitter, extent=50.0)
    data = DelaunayData.measure(pts, window=(pts.min(axis=0), pts.max(axis=0)))
    print(f"{len(pts)} points: discreteness m = {data.m:.3f}, "
          f"covering radius R = {data.R:.3f}")

    x = pts[np.linalg.norm(pts - 25.0, axis=1).argmin()]
    for target in ([45.0, 45.0], [5.0, 40.0], [48.0, 8.0]):
        y = np.asarray(target)
        z = jump_step(data, x, y)
        path = jump_path(data, x, y)
        gap = np.linalg.norm(x - y)
        print(f"\nx = {x.round(2)} -> y = {y}")
        print(f"  first hop lands at {z.round(2)} "
              f"(moved {np.linalg.norm(z - x):.2f} <= 3R = {3 * data.R:.2f}, "
              f"gained {gap - np.linalg.norm(z - y):.2f} >= R)")
        bound = int(np.ceil(gap / data.R))
        print(f"  full path: {path.length} hops (bound {bound}), "
              f"ends {np.linalg.norm(path.waypoints[-1] - y):.2f} from target "
              f"(< 2R = {2 * data.R:.2f})")

    # the construction degrades gracefully: a coarser set jumps farther
    coarse = jittered_grid(rng, 2 * h, jitter, extent=50.0)
    cdata = DelaunayData.measure(coarse, window=(coarse.min(axis=0), coarse.max(axis=0)))
    cpath = jump_path(cdata, coarse[0], np.array([45.0, 45.0]))
    print(f"\ncoarser set (R = {cdata.R:.2f}): same trip takes "
          f"{cpath.length} hops")


if __name__ == "__main__":
    main()
