"""
Exception hierarchy for the matchings library.

Each family carries the process exit code the CLI maps it to.
"""


class HypermatchError(Exception):
    """Base class for all library errors."""
    exit_code = 1


class BudgetExceededError(HypermatchError):
    """An exact computation went over its node or memory budget."""
    exit_code = 3

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class HypergraphError(HypermatchError):
    """Invalid hypergraph data or vertex arguments."""
    exit_code = 4


class NonUniformEdgeError(HypergraphError):
    pass


class OutOfRangeVertexError(HypergraphError):
    pass


class DuplicateEdgeError(HypergraphError):
    pass


class DuplicateVertexInEdgeError(HypergraphError):
    pass


class UnknownVertexError(HypergraphError):
    pass


class MixedUniformityError(HypergraphError):
    pass


class DisjointnessViolatedError(HypergraphError):
    pass


class HypergraphSyntaxError(HypermatchError):
    """Malformed hypergraph text or JSON."""
    exit_code = 5

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConstructionError(HypermatchError):
    exit_code = 6


class NotExtendableError(ConstructionError):
    pass


class NotFoundError(ConstructionError):
    pass


class ConstructionAmbiguousError(ConstructionError):
    """A construction recipe produced output that failed validation."""

    def __init__(self, message, failed_invariant=None):
        super().__init__(message)
        self.failed_invariant = failed_invariant


class DynamicsError(HypermatchError):
    exit_code = 7


class DomainError(DynamicsError):
    pass


class NoThreeFixedPointsError(DynamicsError):
    def __init__(self, message, d=None):
        super().__init__(message)
        self.d = d


class RationalBlowupError(DynamicsError):
    pass


class WalkTreeError(HypermatchError):
    exit_code = 8


class InvalidWalkError(WalkTreeError):
    pass


class NotAHypertreeError(WalkTreeError):
    pass


class CheckFailedError(HypermatchError):
    """A requested verification ran to completion and reported a failure."""
    exit_code = 9
