"""
Exception hierarchy.

Every error carries the process exit code the CLI reports for it.
"""


class SphereBranchError(Exception):
    """Base error for spherebranch."""

    exit_code = 2


class InvalidInputError(SphereBranchError):
    """Input that violates a documented precondition."""

    exit_code = 3


class InvalidTruncationError(InvalidInputError):
    pass


class ConstraintViolationError(InvalidInputError):
    pass


class DimensionMismatchError(InvalidInputError):
    pass


class SchemaError(InvalidInputError):
    """Schema validation failure; `field_path` is the dotted location."""

    def __init__(self, message: str, field_path: str = ""):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)


class ComputationError(SphereBranchError):
    """A numerical procedure could not produce a trustworthy answer."""

    exit_code = 2


class PencilDegenerateError(ComputationError):
    pass


class NotAnEigenvalueError(ComputationError):
    pass


class SingularArgumentError(ComputationError):
    pass


class DegenerateDifferentialError(ComputationError):
    pass


class NonIsolatingIntervalError(ComputationError):
    pass


class EndpointCollisionError(ComputationError):
    pass


class EpsilonExhaustedError(ComputationError):
    pass


class UnsupportedMapError(ComputationError):
    pass


class ResolutionError(ComputationError):
    pass


class FitError(ComputationError):
    pass


class NonCompanionError(ComputationError):
    pass


class TransversalityError(ComputationError):
    """The splitting H = Im T ⊕ C(Ker T) does not exist."""


class DomainError(ComputationError):
    pass


class ConvergenceError(ComputationError):
    """A Newton corrector did not reach its tolerance."""
