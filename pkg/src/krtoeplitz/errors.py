"""Exception hierarchy shared by the package."""


class KRError(ValueError):
    """Base class for every error raised by krtoeplitz."""


# exact arithmetic / geometry

class DimensionMismatchError(KRError):
    pass


class UnsupportedDimensionError(KRError):
    pass


# diagram validation

class DiagramError(KRError):
    """A level violates one of the structural conditions.

    ``condition`` is the number of the construction condition that failed
    (1: root shape, 2: column count, 5: support/twins/heights, 6: order).
    ``columns`` lists the offending 1-based column indices.
    """

    condition = 0

    def __init__(self, message, columns=()):
        self.columns = tuple(columns)
        super().__init__(f"condition {self.condition}: {message}")


class RootShapeError(DiagramError):
    condition = 1


class ColumnCountError(DiagramError):
    condition = 2


class SimplicityError(DiagramError):
    condition = 5


class TwinError(DiagramError):
    condition = 5


class HeightError(DiagramError):
    condition = 5


class OrderError(DiagramError):
    condition = 6


class UndefinedAtRootError(KRError):
    pass


# surgeries

class SurgeryError(KRError):
    pass


class InfeasibleSurgeryError(SurgeryError):
    pass


class SurgeryPreconditionError(SurgeryError):
    pass


class NotDominatedError(SurgeryError):
    pass


class UnbalancedPairError(SurgeryError):
    pass


class NeedsDeeperLevelError(SurgeryError):
    pass


# builder

class BracketingError(KRError):
    pass


class InfeasibleApportionError(KRError):
    pass


class ConfigError(KRError):
    pass
