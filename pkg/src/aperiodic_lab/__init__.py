"""Complexity, repetitivity, and deformation analysis of d-dimensional
substitution subshifts (d = 1, 2), with the Euclidean constructions used to
compare patterns across local recodings: equivalence witnesses, jump paths,
deterministic Delaunay triangulations, piecewise-affine extensions, and
edge-cocycle deformations."""

from .counting import (
    ComplexitySeries,
    EquivalenceWitness,
    check_equivalence,
    complexity,
    entropy_estimate,
    exponent_estimate,
    morse_hedlund_check,
)
from .deformation import (
    EdgeCocycle,
    VertexWeight,
    add_cocycles,
    coboundary,
    deformed_delaunay,
    integrate,
    lattice_displacement,
    nondegeneracy_check,
    path_agreement,
    verify_cocycle,
)
from .derivation import (
    BlockCode,
    PointingRule,
    apply_code,
    apply_pointing,
    mld_check,
    union_pointing,
)
from .errors import (
    AperiodicLabError,
    CapacityError,
    CocycleError,
    DegenerateGeometryError,
    FixtureError,
    FormatError,
    IncompleteTableError,
    InsufficientDataError,
    InsufficientWindowError,
    NotRelativelyDenseError,
    RangeOverlapError,
    UnsupportedDimensionError,
)
from .geometry import (
    DelaunayData,
    delaunay_radii,
    delaunay_triangulate,
    growth_envelope,
    jump_path,
    jump_step,
    pa_extend,
)
from .recurrence import (
    RepetitivitySeries,
    linear_repetitivity_check,
    repetitivity,
    repetitivity_equivalence,
    return_vectors,
)
from .symbolic import (
    Alphabet,
    Configuration,
    Provenance,
    SubstitutionRule,
    certify_language,
    expand,
    primitivity_check,
)

__version__ = "0.1.0"
