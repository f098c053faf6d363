"""Exception types shared across the solver modules."""


class ShapeError(ValueError):
    """Raised when grids or arrays have incompatible shapes or extents."""


class AlignmentError(ValueError):
    """Raised when a subgrid's nodes do not coincide with parent-grid nodes."""


class SingularityError(ValueError):
    """Raised when a Green's function would be evaluated at zero distance."""


class SupportViolationError(ValueError):
    """Raised when a density is not zero on (or near) the domain boundary."""


class PGridFormatError(ValueError):
    """Raised when a PGRID file is malformed or uses unknown header keys."""
