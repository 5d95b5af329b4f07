"""Exception types shared across the package.

Everything derives from ValueError so callers can treat any of these as a
domain failure, while still being able to catch the specific condition.
"""

from __future__ import annotations

__all__ = [
    "DegenerateDensityError",
    "ImpossibleOutcomeError",
    "SchemaError",
    "UnstableEquilibriumError",
]


class UnstableEquilibriumError(ValueError):
    """The break point landed on a boundary between outcome regions.

    A break exactly on a region boundary belongs to no single outcome, so
    callers are expected to resample rather than pick a side.
    """


class ImpossibleOutcomeError(ValueError):
    """Conditioning on an outcome whose probability is exactly zero."""


class DegenerateDensityError(ValueError):
    """A density with no breakable region cannot produce any outcome."""


class SchemaError(ValueError):
    """A configuration document failed structural validation."""
