"""Weak filters and weak ultrafilters over finite world sets.

A weak filter over a base world set M is a non-empty family of subsets of M
that is upward closed and never contains both a subset and its complement.
A weak ultrafilter additionally decides every subset-or-complement pair.
Subsets are bitmasks over the base's canonical world order (bit ``i`` is
``base[i]``); this is weaker than a classical filter, which would also be
closed under intersection.

Plausibility extraction and the reconciliation vote (ultraproduct) live here
as well: the vote makes a ground atom true exactly when the set of base
worlds satisfying it belongs to the ultrafilter.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Iterator

from .errors import EmptyWorldSetError, FilterError
from .logic import Formula, Not, World, evaluate
from .worlds import WorldSet

#: Largest base size for which member families are materialized extensionally.
EXTENSIONAL_BASE_LIMIT = 24


def support_mask(base: WorldSet, p: Formula) -> int:
    """Bitmask of the base worlds in which ``p`` is true."""
    mask = 0
    for i, w in enumerate(base):
        if evaluate(w, p):
            mask |= 1 << i
    return mask


def _check_members(members: Iterable[int], base_size: int) -> frozenset:
    out = frozenset(members)
    top = 1 << base_size
    for m in out:
        if not 0 <= m < top:
            raise FilterError(f"member {m:#b} is not a subset of the base")
    return out


def _upward_closed(members: frozenset, base_size: int) -> bool:
    # One-step closure implies full closure: any superset is reachable by
    # adding single worlds.
    for x in members:
        for i in range(base_size):
            bit = 1 << i
            if not x & bit and (x | bit) not in members:
                return False
    return True


def _no_complement_pair(members: frozenset, full: int) -> bool:
    return all(full ^ x not in members for x in members)


def is_weak_filter(members: Iterable[int], base: WorldSet) -> bool:
    """Check the weak filter axioms: non-empty, upward closed, and never
    both a set and its complement."""
    n = len(base)
    fam = _check_members(members, n)
    if not fam:
        return False
    full = (1 << n) - 1
    return _upward_closed(fam, n) and _no_complement_pair(fam, full)


def is_weak_ultrafilter(members: Iterable[int], base: WorldSet) -> bool:
    """Check the weak ultrafilter axioms: a weak filter that decides every
    subset-or-complement pair.

    Deciding every pair while holding no complementary pair forces exactly
    one member per pair, hence ``2**(n-1)`` members; that count check stands
    in for scanning absent subsets.
    """
    n = len(base)
    fam = _check_members(members, n)
    if n == 0 or len(fam) != 1 << (n - 1):
        return False
    full = (1 << n) - 1
    return _upward_closed(fam, n) and _no_complement_pair(fam, full)


class WeakFilter:
    """A validated weak filter, stored extensionally or as a principal family.

    The principal form holds only a generator mask g and represents all
    supersets of g within the base; membership tests stay O(1) for bases too
    large to materialize.
    """

    __slots__ = ("base", "_members", "_generator")

    def __init__(
        self,
        base: WorldSet,
        members: Iterable[int] | None = None,
        *,
        generator: int | None = None,
        _validated: bool = False,
    ):
        if len(base) == 0:
            raise FilterError("filter base must be non-empty")
        if (members is None) == (generator is None):
            raise FilterError("pass exactly one of members= or generator=")
        self.base = base
        n = len(base)
        if generator is not None:
            if generator == 0:
                raise FilterError(
                    "principal generator must be non-empty (the empty set "
                    "would admit complementary pairs)"
                )
            if not 0 < generator < (1 << n):
                raise FilterError("generator is not a subset of the base")
            self._generator = generator
            self._members = None
        else:
            if n > EXTENSIONAL_BASE_LIMIT:
                raise FilterError(
                    f"extensional members need base size <= {EXTENSIONAL_BASE_LIMIT}"
                )
            fam = _check_members(members, n)
            if not _validated and not is_weak_filter(fam, base):
                raise FilterError("family violates the weak filter axioms")
            self._members = fam
            self._generator = None

    @classmethod
    def principal(cls, base: WorldSet, generator: int) -> "WeakFilter":
        """The filter of all supersets of ``generator`` within the base."""
        return cls(base, generator=generator)

    @classmethod
    def from_members(cls, base: WorldSet, members: Iterable[int]) -> "WeakFilter":
        return cls(base, members)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.base)) - 1

    @property
    def is_principal(self) -> bool:
        return self._generator is not None

    def is_member(self, mask: int) -> bool:
        if not 0 <= mask <= self.full_mask:
            raise FilterError(f"mask {mask:#b} is not a subset of the base")
        if self._generator is not None:
            return mask & self._generator == self._generator
        return mask in self._members

    def member_masks(self) -> frozenset:
        """Materialize the member family (refused for oversized bases)."""
        if self._members is not None:
            return self._members
        n = len(self.base)
        if n > EXTENSIONAL_BASE_LIMIT:
            raise FilterError(
                f"cannot materialize members over a base of {n} worlds"
            )
        return frozenset(_supersets(self._generator, self.full_mask))

    def __repr__(self) -> str:
        if self._generator is not None:
            return f"WeakFilter(principal {self._generator:#b} over {len(self.base)} worlds)"
        return f"WeakFilter({len(self._members)} members over {len(self.base)} worlds)"


def _supersets(mask: int, full: int) -> Iterator[int]:
    free = full & ~mask
    sub = free
    while True:
        yield mask | sub
        if sub == 0:
            return
        sub = (sub - 1) & free


class WeakUltrafilter(WeakFilter):
    """A weak filter that decides every subset-or-complement pair."""

    def __init__(
        self,
        base: WorldSet,
        members: Iterable[int] | None = None,
        *,
        generator: int | None = None,
        _validated: bool = False,
    ):
        super().__init__(base, members, generator=generator, _validated=_validated)
        if self._generator is not None:
            if self._generator.bit_count() != 1:
                raise FilterError(
                    "a principal weak ultrafilter needs a single-world generator"
                )
        elif not _validated and not is_weak_ultrafilter(self._members, base):
            raise FilterError("family violates the weak ultrafilter axioms")


class PlausibilityStatus(Enum):
    PLAUSIBLE = "plausible"
    IMPLAUSIBLE = "implausible"
    UNDETERMINED = "undetermined"


def plausibility_status(f: WeakFilter, p: Formula) -> PlausibilityStatus:
    """Classify ``p`` against the filter: plausible when its support set is a
    member, implausible when the complement is, undetermined otherwise."""
    support = support_mask(f.base, p)
    if f.is_member(support):
        return PlausibilityStatus.PLAUSIBLE
    if f.is_member(f.full_mask ^ support):
        return PlausibilityStatus.IMPLAUSIBLE
    return PlausibilityStatus.UNDETERMINED


def plausible_facts(
    worlds: WorldSet, candidates: Iterable[Formula] | None = None
) -> frozenset:
    """The candidate formulas true in every world of ``worlds``.

    The candidate set defaults to all ground literals of the universe, so the
    result is the decided part of the shared theory.
    """
    if len(worlds) == 0:
        raise EmptyWorldSetError("plausible facts over an empty world set")
    if candidates is None:
        candidates = []
        for a in worlds.universe.atoms:
            candidates.append(a)
            candidates.append(Not(a))
    return frozenset(
        c for c in candidates if all(evaluate(w, c) for w in worlds)
    )


def extend_to_ultrafilter(f: WeakFilter) -> WeakUltrafilter:
    """Deterministically extend a weak filter to a weak ultrafilter.

    Every finite weak filter is extendable: no two undecided complementary
    subsets can both conflict with the upward closure of the current family.
    Undecided pairs are resolved in ascending bitmask order, preferring the
    side whose smallest canonical world index is smaller (i.e. the side
    containing world 0).
    """
    n = len(f.base)
    if n > EXTENSIONAL_BASE_LIMIT:
        raise FilterError(f"extension needs base size <= {EXTENSIONAL_BASE_LIMIT}")
    full = f.full_mask
    members = set(f.member_masks())
    excluded = {full ^ x for x in members}

    for x in range(1 << n):
        if x in members or x in excluded:
            continue
        xc = full ^ x
        preferred, other = (x, xc) if x & 1 else (xc, x)
        if _superset_conflicts(preferred, excluded, full):
            preferred, other = other, preferred
            if _superset_conflicts(preferred, excluded, full):
                raise FilterError("input family is not a weak filter")
        for sup in _supersets(preferred, full):
            if sup not in members:
                members.add(sup)
                excluded.add(full ^ sup)

    return WeakUltrafilter(f.base, frozenset(members), _validated=True)


def _superset_conflicts(mask: int, excluded: set, full: int) -> bool:
    return any(sup in excluded for sup in _supersets(mask, full))


def ultraproduct(uf: WeakUltrafilter) -> World:
    """Reconcile the base worlds into one world by ultrafilter vote.

    Each ground atom becomes true exactly when the set of base worlds
    satisfying it is a member of the ultrafilter. The result is a complete
    world; it need not itself belong to the base (callers that care should
    check and report).
    """
    u = uf.base.universe
    assignment = 0
    for i, atom in enumerate(u.atoms):
        if uf.is_member(support_mask(uf.base, atom)):
            assignment |= 1 << i
    return World(u, assignment)
