"""Shared exception types."""


class DataError(ValueError):
    """Malformed or inconsistent input data (CSV schema, ordering, sizes)."""


class DegenerateLawError(ValueError):
    """A distribution parameter set collapses to a point mass."""


class PriceBoundsError(ValueError):
    """A target price violates no-arbitrage bounds for the requested option."""


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure exhausted its budget before converging."""


class GridResolutionError(ConvergenceError):
    """A finite-difference grid is too narrow or coarse for the requested accuracy."""
