"""Exception types shared across the package."""

from __future__ import annotations


class StoryworldsError(Exception):
    """Base class for all errors raised by this package."""


class UniverseError(StoryworldsError):
    """Invalid universe declaration (bad sorts, relations, or arities)."""


class UnknownAtomError(StoryworldsError):
    """A formula mentions an atom the universe does not declare."""


class UniverseMismatchError(StoryworldsError):
    """Two values built over different universes were combined."""


class BoundExceededError(StoryworldsError):
    """Exhaustive enumeration refused because the universe is too large."""

    def __init__(self, atom_count: int, bound: int):
        self.atom_count = atom_count
        self.bound = bound
        super().__init__(
            f"universe has {atom_count} ground atoms, exceeding the "
            f"enumeration bound of {bound}; raise the bound explicitly to proceed"
        )


class InconsistentFabulaError(StoryworldsError):
    """A fabula (or a transition result) has no satisfying world.

    ``conflict`` holds a minimal inconsistent subset of the propositions,
    found by greedy deletion.
    """

    def __init__(self, conflict: tuple = (), message: str | None = None):
        self.conflict = tuple(conflict)
        super().__init__(message or "inconsistent proposition set")


class ParseError(StoryworldsError):
    """Syntax or naming error in a story file, with source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line else message)


class InconsistentStepError(StoryworldsError):
    """A timeline step's accumulated fabula is unsatisfiable."""

    def __init__(self, step: int, conflict: tuple = (), line: int = 0):
        self.step = step
        self.conflict = tuple(conflict)
        self.line = line
        super().__init__(f"step t={step} is inconsistent")


class FilterError(StoryworldsError):
    """Invalid weak filter construction or member outside the base."""


class EmptyWorldSetError(StoryworldsError):
    """An operation that needs at least one world received none."""


class ChannelError(StoryworldsError):
    """Malformed channel specification or channel output violating the
    reader's universe."""


class MetricError(StoryworldsError):
    """A metric's precondition failed (empty question set, empty
    conditional sub-population, no kernel in range, missing answers)."""
