"""Domain exceptions. Violations of the standing assumptions are data, not errors."""

from __future__ import annotations


class PoAError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(PoAError, ValueError):
    """Malformed instance, allocation, rule or program (bad index, n mismatch, ragged rows)."""


class PreconditionError(PoAError):
    """A formula or program was invoked outside the domain where it is valid."""


class CapacityError(PoAError):
    """Exhaustive enumeration would exceed the configured profile cap."""

    def __init__(self, profiles: int, cap: int) -> None:
        super().__init__(f"{profiles} profiles exceed oracle cap {cap}")
        self.profiles = profiles
        self.cap = cap


class SolverError(PoAError, RuntimeError):
    """An LP that must be solvable was not, or the pivot budget ran out."""
