"""Propositional logic over finite typed universes.

A universe declares constant sorts and relation signatures; grounding every
relation over its argument sorts yields a finite, canonically ordered list of
atoms. A world is a total truth assignment over those atoms, packed into an
integer bitmask (bit ``i`` holds the truth of atom ``i``). Consistency and
entailment are decided by exhaustive enumeration, vectorised as bitwise
operations on truth columns: a formula's column is an integer whose bit ``m``
is the formula's value under assignment mask ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import BoundExceededError, UniverseError, UnknownAtomError

#: Default cap on ground-atom count for exhaustive operations. Beyond it,
#: enumeration refuses (BoundExceededError) rather than sampling silently.
DEFAULT_ATOM_BOUND = 24


class Formula:
    """Base class for formula nodes; subclasses are immutable values."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    """A ground atom: a relation name applied to constant names."""

    relation: str
    args: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def key(self) -> tuple:
        """Canonical sort key: lexicographic by relation, then args."""
        return (self.relation, self.args)


@dataclass(frozen=True)
class Constant(Formula):
    """The constant formula ``true`` or ``false``."""

    value: bool


TRUE = Constant(True)
FALSE = Constant(False)


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    items: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("And requires at least two conjuncts")


@dataclass(frozen=True)
class Or(Formula):
    items: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) < 2:
            raise ValueError("Or requires at least two disjuncts")


@dataclass(frozen=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula


class Universe:
    """Typed constant sorts plus relation signatures.

    ``sorts`` maps each sort name to its ordered constants; ``relations`` is a
    sequence of ``(name, argument_sorts)`` pairs. Grounding is canonical:
    atoms are sorted lexicographically by relation name then argument tuple,
    which fixes each atom's index for the life of the universe.
    """

    __slots__ = ("_sorts", "_relations", "_atoms", "_index", "_columns", "_hash")

    def __init__(
        self,
        sorts: Mapping[str, Sequence[str]],
        relations: Sequence[tuple[str, Sequence[str]]],
    ):
        self._sorts: dict[str, tuple[str, ...]] = {}
        for name, constants in sorts.items():
            constants = tuple(constants)
            if len(set(constants)) != len(constants):
                raise UniverseError(f"duplicate constant in sort '{name}'")
            self._sorts[name] = constants

        self._relations: dict[str, tuple[str, ...]] = {}
        for rel, arg_sorts in relations:
            arg_sorts = tuple(arg_sorts)
            if rel in self._relations:
                raise UniverseError(f"duplicate relation '{rel}'")
            if not arg_sorts:
                raise UniverseError(f"relation '{rel}' must have arity >= 1")
            for s in arg_sorts:
                if s not in self._sorts:
                    raise UniverseError(f"relation '{rel}' uses undeclared sort '{s}'")
            self._relations[rel] = arg_sorts

        atoms = []
        for rel, arg_sorts in self._relations.items():
            atoms.extend(_ground_relation(rel, arg_sorts, self._sorts))
        atoms.sort(key=Atom.key)
        self._atoms: tuple[Atom, ...] = tuple(atoms)
        self._index: dict[Atom, int] = {a: i for i, a in enumerate(atoms)}
        self._columns: dict[int, int] = {}
        self._hash = hash(
            (tuple(self._sorts.items()), tuple(self._relations.items()))
        )

    @property
    def sorts(self) -> Mapping[str, tuple[str, ...]]:
        return dict(self._sorts)

    @property
    def relations(self) -> Mapping[str, tuple[str, ...]]:
        return dict(self._relations)

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self._atoms

    @property
    def atom_count(self) -> int:
        return len(self._atoms)

    def atom(self, relation: str, *args: str) -> Atom:
        """Build and validate an atom of this universe."""
        a = Atom(relation, tuple(args))
        self.check_atom(a)
        return a

    def atom_index(self, atom: Atom) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise UnknownAtomError(self._describe_bad_atom(atom)) from None

    def check_atom(self, atom: Atom) -> None:
        if atom not in self._index:
            raise UnknownAtomError(self._describe_bad_atom(atom))

    def check_formula(self, f: Formula) -> None:
        """Validate every atom occurring in ``f`` against this universe."""
        for a in atoms_of(f):
            self.check_atom(a)

    def _describe_bad_atom(self, atom: Atom) -> str:
        rel = self._relations.get(atom.relation)
        if rel is None:
            return f"unknown relation '{atom.relation}'"
        if len(rel) != len(atom.args):
            return (
                f"relation '{atom.relation}' expects {len(rel)} argument(s), "
                f"got {len(atom.args)}"
            )
        for arg, sort in zip(atom.args, rel):
            if arg not in self._sorts[sort]:
                return f"'{arg}' is not a constant of sort '{sort}'"
        return f"unknown atom {atom.relation}({', '.join(atom.args)})"

    # -- truth columns -----------------------------------------------------

    def full_column(self) -> int:
        """All-ones column over the 2**atom_count assignment masks."""
        return (1 << (1 << self.atom_count)) - 1

    def atom_column(self, index: int) -> int:
        """Column of atom ``index``: bit m is set iff mask m sets atom ``index``."""
        col = self._columns.get(index)
        if col is None:
            half = 1 << index
            col = ((1 << half) - 1) << half
            width = half << 1
            total = 1 << self.atom_count
            while width < total:
                col |= col << width
                width <<= 1
            self._columns[index] = col
        return col

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Universe)
            and self._sorts == other._sorts
            and self._relations == other._relations
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (
            f"Universe(sorts={list(self._sorts)}, relations={list(self._relations)}, "
            f"atoms={self.atom_count})"
        )


def _ground_relation(
    rel: str, arg_sorts: tuple[str, ...], sorts: Mapping[str, tuple[str, ...]]
) -> Iterator[Atom]:
    pools = [sorts[s] for s in arg_sorts]
    stack: list[tuple[str, ...]] = [()]
    for pool in pools:
        stack = [prefix + (c,) for prefix in stack for c in pool]
    for args in stack:
        yield Atom(rel, args)


def ground_atoms(universe: Universe) -> tuple[Atom, ...]:
    """All ground atoms of the universe, in canonical order."""
    return universe.atoms


@dataclass(frozen=True)
class World:
    """A complete truth assignment: bit ``i`` of ``mask`` is atom ``i``."""

    universe: Universe
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask < (1 << self.universe.atom_count):
            raise ValueError(f"mask {self.mask} outside assignment range")

    def truth(self, atom: Atom) -> bool:
        return bool(self.mask >> self.universe.atom_index(atom) & 1)

    def literals(self) -> tuple[Formula, ...]:
        """The world's ground-literal theory, in canonical atom order."""
        return tuple(
            a if self.mask >> i & 1 else Not(a)
            for i, a in enumerate(self.universe.atoms)
        )


def atoms_of(f: Formula) -> Iterator[Atom]:
    """Yield every atom occurrence in ``f`` (with repetition)."""
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from atoms_of(f.operand)
    elif isinstance(f, (And, Or)):
        for item in f.items:
            yield from atoms_of(item)
    elif isinstance(f, Implies):
        yield from atoms_of(f.antecedent)
        yield from atoms_of(f.consequent)
    elif isinstance(f, Constant):
        return
    else:
        raise TypeError(f"not a formula: {f!r}")


def map_atoms(f: Formula, fn: Callable[[Atom], Atom]) -> Formula:
    """Rebuild ``f`` with every atom replaced by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Constant):
        return f
    if isinstance(f, Not):
        return Not(map_atoms(f.operand, fn))
    if isinstance(f, And):
        return And(tuple(map_atoms(i, fn) for i in f.items))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(i, fn) for i in f.items))
    if isinstance(f, Implies):
        return Implies(map_atoms(f.antecedent, fn), map_atoms(f.consequent, fn))
    raise TypeError(f"not a formula: {f!r}")


def negate(f: Formula) -> Formula:
    """Negate ``f``, peeling a leading Not instead of stacking two."""
    return f.operand if isinstance(f, Not) else Not(f)


def evaluate(world: World, f: Formula) -> bool:
    """Truth of ``f`` in ``world`` under standard propositional semantics.

    ``Implies(a, b)`` is material implication. Atoms outside the world's
    universe raise UnknownAtomError.
    """
    if isinstance(f, Atom):
        return world.truth(f)
    if isinstance(f, Constant):
        return f.value
    if isinstance(f, Not):
        return not evaluate(world, f.operand)
    if isinstance(f, And):
        return all(evaluate(world, i) for i in f.items)
    if isinstance(f, Or):
        return any(evaluate(world, i) for i in f.items)
    if isinstance(f, Implies):
        return (not evaluate(world, f.antecedent)) or evaluate(world, f.consequent)
    raise TypeError(f"not a formula: {f!r}")


def truth_column(f: Formula, universe: Universe) -> int:
    """Integer whose bit ``m`` is the truth of ``f`` under assignment mask ``m``."""
    full = universe.full_column()
    if isinstance(f, Atom):
        return universe.atom_column(universe.atom_index(f))
    if isinstance(f, Constant):
        return full if f.value else 0
    if isinstance(f, Not):
        return full & ~truth_column(f.operand, universe)
    if isinstance(f, And):
        col = full
        for item in f.items:
            col &= truth_column(item, universe)
        return col
    if isinstance(f, Or):
        col = 0
        for item in f.items:
            col |= truth_column(item, universe)
        return col
    if isinstance(f, Implies):
        a = truth_column(f.antecedent, universe)
        b = truth_column(f.consequent, universe)
        return (full & ~a) | b
    raise TypeError(f"not a formula: {f!r}")


def check_bound(universe: Universe, bound: int | None = None) -> None:
    """Refuse exhaustive work over universes larger than ``bound`` atoms."""
    limit = DEFAULT_ATOM_BOUND if bound is None else bound
    if universe.atom_count > limit:
        raise BoundExceededError(universe.atom_count, limit)


def consistent(
    props: Iterable[Formula], universe: Universe, bound: int | None = None
) -> bool:
    """True iff at least one world satisfies every formula in ``props``.

    Decided by exhaustive enumeration over all assignments (as bitwise
    column intersection), so the universe must fit the configured bound.
    """
    check_bound(universe, bound)
    col = universe.full_column()
    for f in props:
        col &= truth_column(f, universe)
        if col == 0:
            return False
    return col != 0


def entails(
    props: Iterable[Formula],
    q: Formula,
    universe: Universe,
    bound: int | None = None,
) -> bool:
    """True iff every world satisfying ``props`` also satisfies ``q``."""
    check_bound(universe, bound)
    col = universe.full_column()
    for f in props:
        col &= truth_column(f, universe)
    return col & ~truth_column(q, universe) == 0
