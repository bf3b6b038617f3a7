"""Enumeration and manipulation of possible-world sets.

A WorldSet holds the worlds consistent with a fabula, canonically ordered by
assignment mask ascending. Proportions are exact fractions; floats appear
only at report boundaries.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .errors import EmptyWorldSetError, UniverseMismatchError
from .logic import (
    Formula,
    Universe,
    World,
    check_bound,
    evaluate,
    truth_column,
)
from .story import Fabula


class WorldSet:
    """An ordered, duplicate-free set of worlds over one universe."""

    __slots__ = ("universe", "masks", "_mask_set", "_worlds")

    def __init__(self, universe: Universe, masks: Iterable[int]):
        unique = sorted(set(masks))
        top = 1 << universe.atom_count
        if unique and not 0 <= unique[0] <= unique[-1] < top:
            raise ValueError("world mask outside the universe's assignment range")
        self.universe = universe
        self.masks: tuple[int, ...] = tuple(unique)
        self._mask_set = frozenset(unique)
        self._worlds: tuple[World, ...] | None = None

    @property
    def worlds(self) -> tuple[World, ...]:
        if self._worlds is None:
            self._worlds = tuple(World(self.universe, m) for m in self.masks)
        return self._worlds

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[World]:
        return iter(self.worlds)

    def __getitem__(self, i: int) -> World:
        return self.worlds[i]

    def __contains__(self, world: World) -> bool:
        return world.universe == self.universe and world.mask in self._mask_set

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WorldSet)
            and self.universe == other.universe
            and self.masks == other.masks
        )

    def __hash__(self) -> int:
        return hash((self.universe, self.masks))

    def __repr__(self) -> str:
        return f"WorldSet({len(self.masks)} worlds over {self.universe.atom_count} atoms)"


def enumerate_models(
    fabula: Fabula | Iterable[Formula],
    universe: Universe | None = None,
    bound: int | None = None,
) -> WorldSet:
    """All worlds satisfying the fabula, in canonical (mask-ascending) order.

    Accepts a Fabula (universe taken from it) or a plain formula collection
    with an explicit universe. Refuses universes beyond the enumeration bound.
    """
    if isinstance(fabula, Fabula):
        universe = fabula.universe
        props: Iterable[Formula] = fabula.propositions
    else:
        if universe is None:
            raise ValueError("universe required when not passing a Fabula")
        props = tuple(fabula)
    check_bound(universe, bound)
    col = universe.full_column()
    for f in props:
        col &= truth_column(f, universe)
        if col == 0:
            break
    return WorldSet(universe, _bits_of(col))


def _bits_of(col: int) -> Iterator[int]:
    while col:
        low = col & -col
        yield low.bit_length() - 1
        col ^= low


def intersect(a: WorldSet, b: WorldSet) -> WorldSet:
    """Set intersection of two world sets over the same universe."""
    if a.universe != b.universe:
        raise UniverseMismatchError("cannot intersect world sets over different universes")
    return WorldSet(a.universe, a._mask_set & b._mask_set)


def truth_proportion(s: WorldSet, q: Formula) -> Fraction:
    """Exact fraction of worlds in ``s`` where ``q`` holds."""
    if len(s) == 0:
        raise EmptyWorldSetError("truth proportion over an empty world set")
    hits = sum(1 for w in s if evaluate(w, q))
    return Fraction(hits, len(s))


def agreement_check(shared: WorldSet, rho: Iterable[Formula]) -> bool:
    """True iff every world in ``shared`` satisfies every formula in ``rho``."""
    rho = tuple(rho)
    return all(evaluate(w, r) for w in shared for r in rho)


def sample_worlds(
    s: WorldSet,
    k: int,
    seed: int,
    score: Callable[[World], float] | None = None,
) -> WorldSet:
    """Deterministic subset of min(k, |s|) worlds.

    Without ``score``: uniform pseudo-random selection driven by ``seed``.
    With ``score``: the k highest-scoring worlds, ties broken by mask
    ascending (the selection hook for non-uniform notions of likelihood).
    The result keeps canonical order.
    """
    if k < 1:
        raise ValueError("sample size must be >= 1")
    if len(s) == 0:
        raise EmptyWorldSetError("cannot sample from an empty world set")
    if k >= len(s):
        return s
    if score is not None:
        chosen = sorted(s.worlds, key=lambda w: (-score(w), w.mask))[:k]
        return WorldSet(s.universe, (w.mask for w in chosen))
    rng = random.Random(seed)
    picks = rng.sample(range(len(s)), k)
    return WorldSet(s.universe, (s.masks[i] for i in picks))
