"""Exception types shared across the toolkit."""

from __future__ import annotations


class NetcpdError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(NetcpdError, ValueError):
    """An argument is outside its documented domain."""


class DimensionError(NetcpdError, ValueError):
    """Array shapes or matrix structure do not match the operation."""


class ConfigurationError(NetcpdError, ValueError):
    """Model or run configuration is inconsistent."""


class SingularMatrixError(NetcpdError, ValueError):
    """Linear system is singular; carries the offending pivot index."""

    def __init__(self, pivot_index: int, message: str | None = None):
        self.pivot_index = pivot_index
        super().__init__(message or f"singular system at pivot {pivot_index}")


class ParseError(NetcpdError, ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
