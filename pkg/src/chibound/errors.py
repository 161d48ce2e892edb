"""Exception hierarchy shared by every module of the package."""


class ChiboundError(Exception):
    """Base class for all errors raised by chibound."""


class MalformedInputError(ChiboundError, ValueError):
    """Input has the wrong shape (sizes, ranges, JSON layout)."""


class ParseError(MalformedInputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SemanticError(ChiboundError, ValueError):
    """Well-formed input that violates a semantic rule (label range, i == j, ...)."""


class DomainError(ChiboundError, ValueError):
    """Operation applied outside its domain, e.g. a non-bipartite graph."""


class CapacityError(ChiboundError, ValueError):
    """A requested label budget is too small for the decomposition."""


class ResourceError(ChiboundError, RuntimeError):
    """A search budget was exhausted before an exact answer was found."""


class ContractError(ChiboundError, ValueError):
    """A caller-side precondition failed (bad split, non-splendid quotient, ...)."""


class InvariantError(ChiboundError, AssertionError):
    """An internal invariant asserted by the construction did not hold."""
