"""Exception hierarchy shared by every cantorlab module."""


class CantorLabError(Exception):
    """Base class for all library errors."""


class NotMixing(CantorLabError):
    pass


class UnusedLetter(CantorLabError):
    pass


class OutOfDomain(CantorLabError):
    pass


class InvalidBranch(CantorLabError):
    """A branch primitive is not monotone, not contractive, or has its pole inside its domain."""


class InvalidSystem(CantorLabError):
    """Branch images are not nested in, or not disjoint within, their base intervals."""


class NotCyclicallyAdmissible(CantorLabError):
    pass


class BudgetExceeded(CantorLabError):
    """Enumeration would exceed the configured word budget.

    ``partial`` carries whatever was computed before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ScaleTooFine(BudgetExceeded):
    """The requested scale needs more words than the enumeration budget allows."""


class EmptyScale(BudgetExceeded):
    """No word has a cylinder length inside the requested scale window."""


class DegenerateScales(CantorLabError):
    pass


class NestingViolated(CantorLabError):
    pass


class DepthExceedsTail(CantorLabError):
    pass


class TailMismatch(CantorLabError):
    pass


class InadmissibleJoin(CantorLabError):
    pass


class HypothesisViolated(CantorLabError):
    pass


class TargetAboveDimension(CantorLabError):
    pass


class DistortionTooWeak(CantorLabError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(CantorLabError):
    """Invalid experiment configuration, with the offending field path and source line."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path:
            where += f" at '{path}'"
        if line is not None:
            where += f" (line {line})"
        super().__init__(message + where)
        self.path = path
        self.line = line
