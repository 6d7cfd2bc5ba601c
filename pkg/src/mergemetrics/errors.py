"""Exception hierarchy.

Every error carries a stable ``code`` (the class name unless overridden) so the
CLI can report it verbatim.
"""


class MergeTreeError(Exception):
    """Base class for all domain errors raised by mergemetrics."""

    code = "MergeTreeError"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "code" not in cls.__dict__:
            cls.code = cls.__name__


class ValidationError(MergeTreeError):
    pass


class CycleDetected(ValidationError):
    pass


class MultipleRoots(ValidationError):
    pass


class NonIncreasingHeight(ValidationError):
    pass


class NonFiniteHeight(ValidationError):
    pass


class UnknownParent(ValidationError):
    pass


class EmptyTree(ValidationError):
    pass


class InvalidPoint(MergeTreeError):
    pass


class OrderMismatch(MergeTreeError):
    pass


class NegativeEpsilon(MergeTreeError, ValueError):
    pass


class ThreePointViolation(MergeTreeError):
    pass


class DiagonalDominanceViolation(MergeTreeError):
    pass


class TooManyLeaves(MergeTreeError):
    pass


class InvalidLeafCount(MergeTreeError, ValueError):
    pass


class InvalidMatching(MergeTreeError):
    pass


class TooLarge(MergeTreeError):
    pass


class LeafCountMismatch(MergeTreeError):
    pass


class DuplicateLeafHeights(MergeTreeError):
    pass


class NotSameChamber(MergeTreeError):
    pass


class InvalidPath(MergeTreeError):
    pass


class OracleInconsistency(MergeTreeError):
    """Two independent computations of the same quantity disagreed."""


class DocumentSyntaxError(MergeTreeError):
    code = "SyntaxError"

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
