"""Exception hierarchy shared by every module."""

from __future__ import annotations


class VergeError(Exception):
    """Base class for all errors raised by this package."""


# -- formulas ---------------------------------------------------------------


class FormulaError(VergeError):
    """A formula could not be built, checked or rendered."""


class EmptyDomain(FormulaError):
    """A quantifier ranges over a sort with no entities."""


class UnsortedVariable(FormulaError):
    """A quantified variable carries a sort the signature does not declare."""


class DuplicateLabel(FormulaError):
    pass


class UndeclaredSymbol(FormulaError):
    pass


class SortMismatch(FormulaError):
    pass


class UnknownSymbol(FormulaError):
    pass


class SmtSyntaxError(FormulaError):
    """Malformed SMT-LIB2 text. ``position`` is a character offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class NonPropositional(FormulaError):
    pass


class TooManyAtoms(FormulaError):
    pass


# -- solver -----------------------------------------------------------------


class SolverError(VergeError):
    pass


class SolverUnavailable(SolverError):
    pass


class SolverCrashed(SolverError):
    pass


class ProtocolError(SolverError):
    pass


class InconsistentContext(VergeError):
    """The context assertions are jointly unsatisfiable."""


class ContextIrreparable(InconsistentContext):
    pass


class LimitExceeded(VergeError):
    pass


class EmptyAnswer(VergeError):
    pass


# -- gateway ----------------------------------------------------------------


class GatewayError(VergeError):
    pass


class GatewayUnavailable(GatewayError):
    pass


class NetworkError(GatewayUnavailable):
    pass


class RateLimited(GatewayUnavailable):
    pass


class FixtureMiss(GatewayError):
    pass


class MalformedOutput(GatewayError):
    pass


class ConfigError(VergeError):
    pass
