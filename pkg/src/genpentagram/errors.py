"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for numerical geometry failures."""


class DegenerateCurve(GeometryError):
    pass


class StepTooCoarse(GeometryError):
    pass


class IllConditionedFrame(GeometryError):
    pass


class UnexpectedDimension(GeometryError):
    """A subspace intersection (or a span) has the wrong numerical dimension."""

    def __init__(self, message, vertex=None):
        if vertex is not None:
            message = f"{message} (vertex {vertex})"
        super().__init__(message)
        self.vertex = vertex


class NonLiftable(GeometryError):
    """The discrete normalization det(V_i..V_{i+m}) = 1 has no solution."""

    def __init__(self, message, product=None):
        super().__init__(message)
        self.product = product


class ChartFailure(GeometryError):
    pass


class NoCleanOrder(GeometryError):
    pass


class InvalidSchema(ValueError):
    pass


class InvalidOffsets(InvalidSchema):
    pass


class DegenerateAnsatz(InvalidSchema):
    pass


class FloorUnderflow(ArithmeticError):
    pass


class NotMonic(ValueError):
    pass


class MissingNormalization(ValueError):
    pass


class UnsupportedDimension(ValueError):
    pass


class RepeatedEntries(ValueError):
    pass


class DegeneratePlanes(ValueError):
    pass
