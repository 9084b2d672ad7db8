"""Exceptions raised by the algebra, curve and foliation layers.

Every exception carries an ``ErrorCode`` so the CLI and the report builder
can act on it without parsing messages.

Usage:
    from src.errors import ComputationError
    from src.models import ErrorCode

    raise ComputationError(ErrorCode.NOT_STABILIZED, "raise the degree bound")
"""

from typing import Optional

from src.models import ErrorCode


class LeafboundError(Exception):
    """Base class for all Leafbound failures."""

    def __init__(self, code: ErrorCode, message: str):
        super().__init__(f"{code.value}: {message}")
        self.code = code
        self.message = message


class ParseError(LeafboundError):
    """Malformed polynomial or input file.

    Attributes:
        position: 0-based column in the offending text
        line: 1-based line number when parsing a file
    """

    def __init__(
        self,
        message: str,
        position: Optional[int] = None,
        line: Optional[int] = None,
        code: ErrorCode = ErrorCode.PARSE_ERROR,
    ):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"column {position + 1}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(code, f"{message}{suffix}")
        self.position = position
        self.line = line
        self.detail = message

    def at_line(self, line: int) -> "ParseError":
        """Copy of this error located on a file line."""
        return ParseError(self.detail, self.position, line, self.code)


class HypothesisError(LeafboundError):
    """The input violates a hypothesis of the requested operation."""


class ComputationError(LeafboundError):
    """A bounded search or a stabilization test did not succeed."""
