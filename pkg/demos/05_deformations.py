"""Pattern-equivariant deformations: verify a cocycle, integrate it, check
the result is still a lattice-like point set.

An edge cocycle assigns a displacement vector to each lattice edge from the
local symbol pattern.  If every closed circuit sums to zero the cocycle
integrates to vertex positions; a coboundary (difference of a vertex weight)
perturbs the lattice by a bounded amount and keeps cells non-degenerate.
"""

import numpy as np

from aperiodic_lab import (
    EdgeCocycle,
    VertexWeight,
    add_cocycles,
    certify,
    coboundary,
    deformed_delaunay,
    expand,
    integrate,
    lattice_displacement,
    nondegeneracy_check,
    path_agreement,
    verify_cocycle,
)
from aperiodic_lab.errors import CocycleError


def main():
    rule = certify.fixture_rule("thue_morse_2d")
    config = expand(rule, "0", 5)
    print(f"window {config.shape} over {config.alphabet.symbols}")

    def bump(pat):
        return [0.2, -0.1] if int(pat.ravel()[0]) == 0 else [-0.2, 0.1]

    weight = VertexWeight.from_function(config, 0, bump, "bump")
    deform = add_cocycles(EdgeCocycle.coordinate(2), coboundary(weight))
    report = verify_cocycle(config, deform)
    print(f"circuit check: plaquette defect {report.max_plaquette_defect}, "
          f"rectangle defect {report.max_rectangle_defect} "
          f"over {report.plaquettes_checked} plaquettes "
          f"+ {report.rectangles_checked} rectangles")

    pattern = integrate(config, deform, report=report)
    gap = path_agreement(config, deform, pattern, n_paths=100)
    print(f"tree potential vs 100 random paths: worst gap {gap}")
    print(f"displacement from the reference lattice: "
          f"{lattice_displacement(pattern):.4f}")

    nd = nondegeneracy_check(pattern)
    print(f"non-degeneracy: {nd.failing_cells}/{nd.cells_checked} cells fail, "
          f"min area {nd.min_area:.4f}, min turn {nd.min_turn:.4f}")

    data = deformed_delaunay(pattern)
    print(f"deformed set: m = {data.m:.3f}, R = {data.R:.3f} "
          "(still uniformly discrete and relatively dense)")

    # a random edge table almost surely breaks circuit sums
    rng = np.random.default_rng(3)
    junk = EdgeCocycle.from_function(
        config, 0, lambda axis, pat: rng.uniform(-1, 1, size=2), "junk"
    )
    bad = verify_cocycle(config, junk)
    print(f"\nrandom table: holds={bad.holds}, "
          f"worst plaquette defect {bad.max_plaquette_defect:.3f}")
    try:
        integrate(config, junk, report=bad)
    except CocycleError as exc:
        print(f"integrate refused it: {exc}")

    # reversing every edge keeps circuits exact but destroys orientation
    neg = EdgeCocycle(dimension=2, radius=0, name="negate",
                      fn=lambda axis, pat: -np.eye(2)[axis])
    nd_neg = nondegeneracy_check(integrate(config, neg))
    print(f"edge reversal: {nd_neg.failing_cells}/{nd_neg.cells_checked} "
          "cells fail non-degeneracy")


if __name__ == "__main__":
    main()
