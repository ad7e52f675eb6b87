"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CertquadError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CertquadError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class InvalidBoundsError(DomainError):
    """Smoothness constants are inconsistent, e.g. ``gamma > Gamma``."""


class EvaluationError(DomainError):
    """An expression node was evaluated outside its natural domain."""

    def __init__(self, node: str, x: float, reason: str):
        self.node = node
        self.x = x
        self.reason = reason
        super().__init__(f"{reason} in {node} at x={x!r}")


class ParseError(CertquadError, ValueError):
    """Malformed expression text."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class IntegrationError(CertquadError, RuntimeError):
    """The reference integrator did not reach its tolerance within budget."""


class DensityError(CertquadError, ValueError):
    """A probability density failed validation (sign or normalisation)."""
