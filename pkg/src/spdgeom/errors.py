"""Exception types raised by spdgeom."""


class GeometryError(ValueError):
    """Base class for the math-domain failures of this package."""


class NotSymmetricError(GeometryError):
    pass


class NotPositiveDefiniteError(GeometryError):
    pass


class DomainError(GeometryError):
    """A scalar function was evaluated outside its domain."""


class NotDiffeomorphismError(GeometryError):
    pass


class DimensionError(GeometryError):
    pass


class InvalidPowerError(GeometryError):
    pass


class EvaluationError(GeometryError):
    """A bivariate function returned non-finite values on a check grid."""


class UnsupportedBaseError(GeometryError):
    pass


class DomainExitError(GeometryError):
    """A geodesic was evaluated outside its interval of definition."""


class DegeneratePlaneError(GeometryError):
    pass


class NotCommutingError(GeometryError):
    pass


class InvalidPairError(GeometryError):
    pass


class QuadratureError(GeometryError):
    pass


class StepUnderflowError(GeometryError):
    pass
