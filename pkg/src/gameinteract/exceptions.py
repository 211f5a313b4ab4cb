"""Exception hierarchy shared by every module."""


class GameInteractError(Exception):
    """Base class for errors raised by gameinteract."""


class DomainError(GameInteractError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class FormatError(GameInteractError, ValueError):
    """Malformed model file, table or manifest."""


class CapacityError(GameInteractError):
    """Problem size exceeds a configured enumeration cap."""


class DegenerateError(GameInteractError, ArithmeticError):
    """A quantity is undefined for the given input (zero norm, zero scale)."""
