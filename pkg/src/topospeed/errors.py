"""Exception hierarchy shared by every module."""


class TopoError(Exception):
    """Base class for all errors raised by the package."""


class InputError(TopoError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class BudgetExceeded(TopoError):
    """A configured ceiling (simplices, search nodes, facets) was hit."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = dict(stats or {})


class DuplicateName(InputError):
    pass


class EmptySimplex(InputError):
    pass


class NotInComplex(InputError):
    pass


class EmptyNameSet(InputError):
    pass


class EmptyValueSet(InputError):
    pass


class EmptyResult(InputError):
    pass


class BadParams(InputError):
    pass


class NotPure(InputError):
    pass


class NotInModel(InputError):
    pass


class NameMismatch(InputError):
    pass


class OpenPattern(InputError):
    pass


class IdSpaceTooSmall(InputError):
    pass


class SemanticError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, col=None):
        where = "" if line is None else f" (line {line}, col {col})"
        super().__init__(message + where)
        self.line = line
        self.col = col


class PartialMap(InputError):
    pass


class NotLocallyCheckable(TopoError):
    pass


class NotEdgeCheckable(TopoError):
    pass


class EmptyIntersection(TopoError):
    pass


class IndependenceViolated(TopoError):
    pass


class HypothesisLost(TopoError):
    pass
