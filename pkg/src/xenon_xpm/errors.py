"""Exception hierarchy shared by the library and the CLI."""


class XpmError(Exception):
    """Base class for all package errors."""


class ConfigError(XpmError, ValueError):
    """Invalid configuration key, value or combination."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = ""
        if key is not None:
            where += f"{key}: "
        if line is not None:
            where = f"line {line}: " + where
        super().__init__(where + message)


class DomainError(XpmError, ValueError):
    """Physical input outside the domain of a formula (resonance, unstable cavity, ...)."""


class StrongMixingError(DomainError):
    """The dressed state cannot be identified with a single bare state."""

    def __init__(self, message, overlap, eigenvalues):
        super().__init__(message)
        self.overlap = overlap
        self.eigenvalues = tuple(eigenvalues)


class NumericalError(XpmError, ArithmeticError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class EmptyResultError(XpmError, ValueError):
    """No usable data points were available."""
