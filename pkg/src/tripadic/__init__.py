"""Desk-scale p-adic computations for triple-product interpolation over totally real fields."""

from __future__ import annotations

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    IdentityFailure,
    PrecisionError,
    TripadicError,
    TruncationError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DegenerateError",
    "DomainError",
    "IdentityFailure",
    "PrecisionError",
    "TripadicError",
    "TruncationError",
]
