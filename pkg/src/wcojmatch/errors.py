"""Exception types shared across the package."""


class WcojError(Exception):
    """Base class for all package errors."""


class EdgeListParseError(WcojError, ValueError):
    """Raised when an edge-list or query file line cannot be parsed."""

    def __init__(self, lineno, line, reason="expected two non-negative integers"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")


class ContractViolation(WcojError, ValueError):
    """An input breaks an operation precondition (e.g. unsorted set)."""


class ConfigurationError(WcojError, ValueError):
    """Invalid engine or kernel configuration."""


class QueryError(WcojError, ValueError):
    """Query graph rejected (self-loop, disconnected, too large)."""


class PlanError(WcojError, ValueError):
    """A query vertex ordering cannot be compiled into a plan."""


class ModelError(WcojError, ValueError):
    """The analytic request model is undefined for the given inputs."""


class OracleSizeError(WcojError, ValueError):
    """Input too large for brute-force enumeration."""
