"""Exception types raised across the package."""


class SawtorusError(Exception):
    """Base class for all package errors."""


class PreconditionUnsatisfiable(SawtorusError):
    """An experiment was asked for parameters outside its validity range."""


class NonBijective(SawtorusError):
    """Two lattice sites were mapped onto the same image."""


class InverseMismatch(SawtorusError):
    """The backward lattice step is not the inverse of the forward step."""


class BoundaryAmbiguity(SawtorusError):
    """A floating-point floor was evaluated too close to an integer to be trusted."""


class GridMismatch(SawtorusError):
    """Objects built on different lattices were combined."""


class DepthExceeded(SawtorusError):
    """A discontinuity curve was requested beyond the configured depth."""


class Wrapped(SawtorusError):
    """An evolved point cloud no longer fits inside a single chart of the torus."""
