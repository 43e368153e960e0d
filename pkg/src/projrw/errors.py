"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for refusals raised by the library."""


class PatchViolation(GeometryError):
    """Point lies outside the stereographic coordinate patch."""


class PatchExit(PatchViolation):
    """An integrated curve left the coordinate patch."""


class MetricSingular(GeometryError):
    """The deformed metric degenerates (1 - s R^2 too close to zero)."""


class SingularInput(GeometryError):
    pass


class SingularFrame(GeometryError):
    pass


class DomainError(GeometryError):
    pass


class TurningPoint(GeometryError):
    """Expanding branch reached Rdot = 0."""

    def __init__(self, message, t=None, R=None):
        super().__init__(message)
        self.t = t
        self.R = R


class FriedmannViolation(GeometryError):
    pass


class NotProjectivelyRelated(GeometryError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateDirection(GeometryError):
    pass


class StepFailure(GeometryError):
    pass


class EmptyOverlap(GeometryError):
    pass
