"""Exception hierarchy shared by all modules."""


class HomoclinicError(Exception):
    """Base class for library errors."""


class InvalidArgument(HomoclinicError, ValueError):
    pass


class MeshTooSmall(InvalidArgument):
    pass


class NoRootError(HomoclinicError):
    pass


class ComplexRootsError(HomoclinicError):
    pass


class RealRootsRegimeError(HomoclinicError):
    pass


class FormulaDomainError(HomoclinicError):
    pass


class ConditionVacuousError(HomoclinicError):
    pass


class DegenerateDenominator(HomoclinicError):
    pass


class DegenerateProblem(HomoclinicError):
    pass


class ConstraintViolation(HomoclinicError):
    pass


class EndpointFailure(HomoclinicError):
    pass


class EnergyOverflow(HomoclinicError, OverflowError):
    pass


class NonConvergence(HomoclinicError):
    """Iterative solver gave up. ``best`` holds the best iterate found, if any."""

    def __init__(self, message, best=None, history=None):
        super().__init__(message)
        self.best = best
        self.history = history or []


class MountainCollapse(HomoclinicError):
    pass


class SingularJacobian(HomoclinicError):
    pass


class NumericalFailure(HomoclinicError):
    pass


class InsufficientTail(HomoclinicError):
    pass


class BoundaryLeakWarning(UserWarning):
    """Function is not negligible at the mesh ends."""
