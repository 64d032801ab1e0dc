"""Exception hierarchy.

Each class carries the CLI exit code for its error family so the command
layer never needs a lookup table of its own.
"""


class ToricQuotError(Exception):
    exit_code = 1


class SpecInvalid(ToricQuotError, ValueError):
    exit_code = 2


class InvalidAction(SpecInvalid):
    """Weight data that cannot define a faithful torus action."""


class ResourceBoundExceeded(ToricQuotError):
    exit_code = 3


class TooManyPlanes(ResourceBoundExceeded):
    pass


class NotClosed(ResourceBoundExceeded):
    """Group closure exceeded ``max_order``; likely infinite, or the tolerance is too tight."""


class GridTooCoarse(ResourceBoundExceeded):
    pass


class NumericalDegeneracy(ToricQuotError, ArithmeticError):
    exit_code = 4


class SingularGram(NumericalDegeneracy):
    """The Killing-field Gram matrix is rank deficient: the point is not principal."""


class DegeneratePlane(NumericalDegeneracy):
    pass


class StepTooLarge(NumericalDegeneracy):
    pass


class DegenerateArrangement(NumericalDegeneracy):
    pass


class PreconditionFailed(ToricQuotError, ValueError):
    exit_code = 5


class NotSplit(PreconditionFailed):
    pass


class IsSplit(PreconditionFailed):
    pass


class FixedColumn(PreconditionFailed):
    pass
