"""Exception hierarchy shared by every module."""

from __future__ import annotations


class TripadicError(Exception):
    """Base class for library errors."""


class DomainError(TripadicError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class PrecisionError(TripadicError):
    """A result cannot be determined at the working precision."""


class TruncationError(TripadicError):
    """A result would exceed a truncation cap (degree, level or exponent)."""


class IdentityFailure(TripadicError):
    """An identity that must hold by construction failed numerically."""


class DegenerateError(TripadicError, ZeroDivisionError):
    """A formula hits a pole or an excluded degenerate configuration."""


class ConvergenceError(TripadicError):
    """An iteration did not stabilise within its cap."""


class ConfigError(TripadicError):
    """A configuration file or command line could not be interpreted."""
