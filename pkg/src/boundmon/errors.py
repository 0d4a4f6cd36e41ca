"""Exception hierarchy shared by the whole package."""


class BoundmonError(Exception):
    """Base class for all errors raised by boundmon."""


class DimensionError(BoundmonError, ValueError):
    """Operands have incompatible state dimensions or shapes."""


class InvalidSetError(BoundmonError, ValueError):
    """A set, system or spec violates its construction invariants."""


class FeasibilityError(BoundmonError, RuntimeError):
    """The LP solver failed to return a usable answer."""


class FormatError(BoundmonError, ValueError):
    """A text document could not be parsed.

    ``line`` is the 1-based line number the diagnostic refers to.
    """

    def __init__(self, message: str, line: int):
        self.line = line
        self.reason = message
        super().__init__(f"line {line}: {message}")
