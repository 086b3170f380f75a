"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`SeqSpaceError`.  :class:`PreconditionError` subclasses mark a
violated hypothesis of an operation (the CLI maps them to exit code 3).
"""


class SeqSpaceError(ValueError):
    """Base class for package errors."""


class PreconditionError(SeqSpaceError):
    """An input violates the hypothesis of the requested operation."""


class IndexOutOfRange(PreconditionError):
    pass


class InvalidPartition(PreconditionError):
    pass


class NonDisjointTargets(PreconditionError):
    pass


class OverlappingSupports(PreconditionError):
    pass


class ZeroMember(PreconditionError):
    pass


class NonpositiveTerm(PreconditionError):
    """A weight term is not strictly positive; ``index`` names the first one."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SupportTooLarge(PreconditionError):
    pass


class HypothesisViolated(PreconditionError):
    """Raised by the Lechner verdicts; ``hypothesis`` names the failed one."""

    def __init__(self, message, hypothesis=None):
        super().__init__(message)
        self.hypothesis = hypothesis


class DegenerateFunction(HypothesisViolated):
    """The Orlicz function vanishes where the operation needs it positive."""

    def __init__(self, message, hypothesis="non-degenerate"):
        super().__init__(message, hypothesis)


class InvalidOrliczFunction(PreconditionError):
    """Construction-time check failed (``M(0) != 0``, decreasing or not convex)."""


class InvalidScheme(PreconditionError):
    pass


class UnknownNorm(PreconditionError):
    pass


class LiteralParseError(SeqSpaceError):
    """A family literal or vector source could not be parsed."""
