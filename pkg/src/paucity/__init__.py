"""Experimental engine for sums of two squares with prime coordinates.

The package computes the representation counts r0/r1/r2 (ordered writings
n = a^2 + b^2 with a, b >= 1 and zero, one or two coordinates restricted to
primes), their pairwise mean values up to x, the exact diagonal/off-diagonal
split of the intersection count, congruence densities for the associated
quadratic forms, and the parametrized enumeration of off-diagonal solutions.
"""

from __future__ import annotations

from .errors import CapacityError, PaucityError, TallyOverflowError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "PaucityError",
    "TallyOverflowError",
    "ValidationError",
    "__version__",
]
