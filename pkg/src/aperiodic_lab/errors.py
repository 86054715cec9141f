"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: usage problems exit 2 (argparse),
data/precondition problems exit 3, missing bundled fixtures exit 4, anything
else (internal invariant violations) exits 5.
"""


class AperiodicLabError(Exception):
    """Base class for all library errors."""


class FormatError(AperiodicLabError):
    """Malformed rule file, configuration file, table or series."""


class CapacityError(AperiodicLabError):
    """An operation would exceed its configured cell or sample budget."""


class UnsupportedDimensionError(AperiodicLabError):
    """Operation defined only for a subset of dimensions (usually d=1)."""


class InsufficientDataError(AperiodicLabError):
    """Not enough (certified) entries to run an estimator."""


class RangeOverlapError(AperiodicLabError):
    """Certified ranges of two series do not overlap on the needed points."""


class InsufficientWindowError(AperiodicLabError):
    """Window too small for the requested radius or margin."""


class IncompleteTableError(AperiodicLabError):
    """A code/pointing/cocycle table has no entry for an observed pattern."""

    def __init__(self, pattern_key: str, what: str = "table"):
        self.pattern_key = pattern_key
        super().__init__(f"{what} has no entry for pattern {pattern_key!r}")


class NotRelativelyDenseError(AperiodicLabError):
    """Marked set failed the relative-density cap; carries the measured gap."""

    def __init__(self, gap, cap):
        self.gap = gap
        self.cap = cap
        super().__init__(f"marked set not relatively dense: gap {gap} exceeds cap {cap}")


class DegenerateGeometryError(AperiodicLabError):
    """Too few / degenerate points for a geometric construction."""


class CocycleError(AperiodicLabError):
    """Cocycle verification failed or was skipped before integration."""


class FixtureError(AperiodicLabError):
    """A bundled fixture file is missing or unreadable."""
