"""Shared error types.

ValidationError maps to CLI exit code 2 (bad input / contract violation),
CapacityError and its subclasses map to exit code 3 (resource limits).
"""

from __future__ import annotations


class PaucityError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PaucityError):
    """Input violates a documented precondition."""


class CapacityError(PaucityError):
    """Requested computation exceeds a hard resource budget."""


class TallyOverflowError(CapacityError):
    """A 16-bit representation tally would overflow."""
