"""Exception types raised by vrusim."""


class VrusimError(Exception):
    """Base class for all vrusim errors."""


class ParseError(VrusimError):
    """Scenario text is not well-formed TOML."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class ValidationError(VrusimError, ValueError):
    """A scenario field violates an invariant. ``field`` is the dotted key path."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field} {message}")


class UnknownField(VrusimError):
    def __init__(self, field: str):
        self.field = field
        super().__init__(f"unknown field {field!r}")


class UnknownScenario(VrusimError, KeyError):
    def __str__(self) -> str:
        return f"unknown scenario {self.args[0]!r}"


class UnknownParamPath(VrusimError):
    def __init__(self, path: str, reason: str = "not a numeric scenario field"):
        self.path = path
        super().__init__(f"{path}: {reason}")


class OutOfRange(VrusimError, ValueError):
    """Arc length outside ``[0, total_length]``."""


class EmptyTrace(VrusimError, ValueError):
    pass
