"""Piecewise-affine extensions of vertex maps and their growth envelopes.

A map defined on the vertices of a triangulation extends affinely on each
simplex.  The extension's Lipschitz constant is the largest per-simplex
spectral norm, orientation is tracked per simplex, and growth_envelope fits
the smallest |f(x)| <= M |x| + C bound over sample pairs.
"""

import itertools

import numpy as np

from aperiodic_lab import delaunay_triangulate, growth_envelope, pa_extend


def main():
    pts = np.array(list(itertools.product(range(6), range(6))), dtype=float)
    tri = delaunay_triangulate(pts)
    print(f"triangulated {len(tri.points)} grid points into "
          f"{len(tri.simplices)} triangles")

    ident = pa_extend(tri, tri.points)
    shear = np.array([[1.0, 0.6], [0.0, 1.0]])
    sheared = pa_extend(tri, tri.points @ shear.T)
    print(f"identity lipschitz {ident.lipschitz:.6f}; "
          f"shear lipschitz {sheared.lipschitz:.6f} "
          f"(matrix norm {np.linalg.norm(shear, 2):.6f})")

    x = np.array([2.3, 1.7])
    print(f"shear at {x}: {sheared.evaluate(x).round(4)} "
          f"(exact {shear @ x})")

    # dragging one interior vertex across a face flips simplices
    images = tri.points.copy()
    vid = int(np.flatnonzero((pts[:, 0] == 2) & (pts[:, 1] == 2))[0])
    images[vid] = [3.5, 3.5]
    folded = pa_extend(tri, images)
    flipped = int((folded.orientations < 0).sum())
    print(f"after folding vertex {vid}: {flipped} simplices reversed "
          f"orientation, lipschitz grew to {folded.lipschitz:.3f}")

    # recover (M, C) from norm samples of an affine-plus-offset map
    rng = np.random.default_rng(9)
    xs = np.vstack([np.zeros((1, 2)), rng.uniform(-5, 5, size=(500, 2))])
    dirs = rng.standard_normal(xs.shape)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    ys = dirs * (1.25 * np.linalg.norm(xs, axis=1) + 0.5)[:, None]
    fit = growth_envelope(xs, ys)
    print(f"envelope fit: |f(x)| <= {fit.M:.6g} |x| + {fit.C:.6g} "
          f"(grid step {fit.grid_step})")


if __name__ == "__main__":
    main()
