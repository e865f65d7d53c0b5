"""Exception types raised by the package."""


class CurvatureError(ValueError):
    """Base class for all input and numerical failures in this package."""


class DimensionMismatch(CurvatureError):
    pass


class NonFiniteInput(CurvatureError):
    pass


class NonSymmetricInput(CurvatureError):
    """Raised when a matrix offered as a symmetric form is not symmetric.

    ``pair`` holds the (row, column) index of the worst offending entry.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DependentInput(CurvatureError):
    pass


class DegeneratePlane(CurvatureError):
    pass


class ZeroCoefficient(CurvatureError):
    pass


class ValueOutOfRange(CurvatureError):
    pass


class ConvergenceFailure(CurvatureError):
    pass


class UnrealizableInterval(CurvatureError):
    pass


class StepTooLarge(CurvatureError):
    pass
