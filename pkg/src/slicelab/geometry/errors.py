"""Exception types raised by the geometry kernel."""


class GeometryError(Exception):
    """Base class for geometry kernel failures."""


class DegenerateInput(GeometryError):
    """Input collapses below the dimensionality the operation needs."""


class NonSimpleLoop(GeometryError):
    """Loop edges self-intersect."""


class EmptyLoop(GeometryError):
    """Operation received a loop with no vertices."""


class CapUnsupported(GeometryError):
    """End cap cannot be built because the contour end carries holes."""


class InsufficientContours(GeometryError):
    """Volume reconstruction needs contours on at least two slices."""


class MixedStructureLabels(GeometryError):
    """Contours passed to one reconstruction must share a structure label."""
