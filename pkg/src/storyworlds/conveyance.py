"""Narrator-to-reader conveyance: compression, channels, reconstruction.

The pipeline mirrors how a story travels: the narrator compresses a complete
world into a fabula of literals, the fabula crosses a (possibly lossy or
corrupting) channel, and the reader reconstructs the set of worlds consistent
with what arrived. The accuracy report compares the reader's decided beliefs
with the narrator's world, atom by atom: agreement on a decided atom is a
match, disagreement a mismatch, silence undetermined. The conveyance commutes
(the mediated path agrees with direct transfer) exactly when nothing is
mismatched; undetermined atoms measure lossiness, not error, and are excluded
from the accuracy denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import ChannelError, InconsistentFabulaError, InconsistentStepError
from .filters import WeakFilter, plausible_facts
from .logic import Atom, Formula, Not, Universe, World, map_atoms, negate
from .story import (
    Fabula,
    Timeline,
    TransitionEdit,
    apply_transition,
    delta,
    formula_to_str,
    parse_formula,
)
from .worlds import WorldSet, enumerate_models


class ChannelKind(str, Enum):
    IDENTITY = "identity"
    DROP = "drop"
    RENAME = "rename"
    CORRUPT = "corrupt"


@dataclass(frozen=True)
class Channel:
    """A conveyance medium between narrator and reader.

    ``formulas`` is the payload for drop/corrupt channels; ``rename`` maps
    relation names (injectively, arity-preserving) for rename channels.
    ``seed`` is reserved for stochastic variants and currently unused.
    """

    kind: ChannelKind = ChannelKind.IDENTITY
    formulas: frozenset = frozenset()
    rename: tuple[tuple[str, str], ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "formulas", frozenset(self.formulas))
        object.__setattr__(self, "rename", tuple(sorted(self.rename)))
        targets = [t for _, t in self.rename]
        if len(set(targets)) != len(targets):
            raise ChannelError("rename map must be injective")
        sources = [s for s, _ in self.rename]
        if len(set(sources)) != len(sources):
            raise ChannelError("rename map lists a source relation twice")

    @classmethod
    def identity(cls) -> "Channel":
        return cls(ChannelKind.IDENTITY)

    @classmethod
    def drop(cls, formulas: Iterable[Formula]) -> "Channel":
        return cls(ChannelKind.DROP, formulas=frozenset(formulas))

    @classmethod
    def corrupt(cls, formulas: Iterable[Formula]) -> "Channel":
        return cls(ChannelKind.CORRUPT, formulas=frozenset(formulas))

    @classmethod
    def renaming(cls, mapping: Mapping[str, str]) -> "Channel":
        return cls(ChannelKind.RENAME, rename=tuple(mapping.items()))

    def rename_map(self) -> dict[str, str]:
        return dict(self.rename)


def parse_channel_spec(spec: str, universe: Universe) -> Channel:
    """Parse a channel description.

    Grammar: ``identity`` | ``drop(f1; f2; ...)`` | ``corrupt(f1; ...)`` |
    ``rename(old->new, ...)``. Formulas use the story grammar; rename targets
    must be declared in the universe with matching argument sorts.
    """
    spec = spec.strip()
    if spec == "identity":
        return Channel.identity()
    m = _match_payload(spec)
    if m is None:
        raise ChannelError(f"malformed channel spec: '{spec}'")
    kind, payload = m
    if kind in ("drop", "corrupt"):
        parts = [p.strip() for p in payload.split(";") if p.strip()]
        if not parts:
            raise ChannelError(f"{kind} channel needs at least one formula")
        formulas = [parse_formula(p, universe) for p in parts]
        ctor = Channel.drop if kind == "drop" else Channel.corrupt
        return ctor(formulas)
    if kind == "rename":
        pairs = []
        for part in payload.split(","):
            part = part.strip()
            if not part:
                continue
            if "->" not in part:
                raise ChannelError(f"rename entry '{part}' is not 'old->new'")
            old, new = (x.strip() for x in part.split("->", 1))
            _check_rename(old, new, universe)
            pairs.append((old, new))
        if not pairs:
            raise ChannelError("rename channel needs at least one mapping")
        return Channel(ChannelKind.RENAME, rename=tuple(pairs))
    raise ChannelError(f"unknown channel kind '{kind}'")


def _match_payload(spec: str) -> tuple[str, str] | None:
    for kind in ("drop", "corrupt", "rename"):
        if spec.startswith(kind + "(") and spec.endswith(")"):
            return kind, spec[len(kind) + 1 : -1]
    return None


def _check_rename(old: str, new: str, universe: Universe) -> None:
    rels = universe.relations
    if old not in rels:
        raise ChannelError(f"rename source '{old}' is not a declared relation")
    if new not in rels:
        raise ChannelError(f"rename target '{new}' is not declared in the reader's universe")
    if rels[old] != rels[new]:
        raise ChannelError(
            f"rename '{old}'->'{new}' does not preserve the argument sorts"
        )


def compress(world: World, importance: Callable[[Atom], bool] | None = None) -> Fabula:
    """Compress a complete world into a fabula of its ground literals,
    keeping only atoms that pass the importance predicate (default: all)."""
    u = world.universe
    literals = []
    for i, atom in enumerate(u.atoms):
        if importance is not None and not importance(atom):
            continue
        literals.append(atom if world.mask >> i & 1 else Not(atom))
    return Fabula(u, literals)


def _rewrite(
    formulas: Iterable[Formula],
    channel: Channel,
    warnings: list[str] | None,
    stage: str,
) -> frozenset:
    present = frozenset(formulas)
    if channel.kind is ChannelKind.IDENTITY:
        return present
    if channel.kind is ChannelKind.DROP:
        for target in sorted(channel.formulas - present, key=formula_to_str):
            if warnings is not None:
                warnings.append(
                    f"drop target {formula_to_str(target)} absent from {stage}"
                )
        return present - channel.formulas
    if channel.kind is ChannelKind.RENAME:
        table = channel.rename_map()
        fn = lambda a: Atom(table.get(a.relation, a.relation), a.args)
        return frozenset(map_atoms(f, fn) for f in present)
    if channel.kind is ChannelKind.CORRUPT:
        for target in sorted(channel.formulas - present, key=formula_to_str):
            if warnings is not None:
                warnings.append(
                    f"corrupt target {formula_to_str(target)} absent from {stage}"
                )
        return frozenset(
            negate(f) if f in channel.formulas else f for f in present
        )
    raise ChannelError(f"unknown channel kind {channel.kind!r}")


def transmit(
    fabula: Fabula, channel: Channel, warnings: list[str] | None = None
) -> Fabula:
    """Send a fabula through a channel.

    Drop removes the listed formulas, rename rewrites relation names, corrupt
    replaces listed formulas by their negations. Targets absent from the
    fabula are recorded on ``warnings`` (when given) rather than raised; an
    inconsistent result raises InconsistentFabulaError.
    """
    props = _rewrite(fabula.propositions, channel, warnings, "fabula")
    return Fabula(fabula.universe, props)


@dataclass(frozen=True)
class ReaderState:
    """The reader at one time step: fabula, consistent worlds, the default
    plausibility filter over them, and the decided ground literals."""

    fabula: Fabula
    worlds: WorldSet
    filter: WeakFilter
    beliefs: frozenset


def reconstruct(fabula: Fabula, bound: int | None = None) -> ReaderState:
    """Rebuild a reader state from a received fabula.

    The world set enumerates every model of the fabula; the default filter is
    the principal family generated by the full world set, so exactly the
    facts decided by all worlds are plausible and everything else is
    undetermined.
    """
    worlds = enumerate_models(fabula, bound=bound)
    filt = WeakFilter.principal(worlds, (1 << len(worlds)) - 1)
    beliefs = plausible_facts(worlds)
    return ReaderState(fabula, worlds, filt, beliefs)


@dataclass(frozen=True)
class ConveyanceReport:
    """Atom-by-atom comparison of narrator world and reader beliefs."""

    matched: int
    mismatched: int
    undetermined: int
    accuracy: Fraction
    mismatching_atoms: tuple[Atom, ...]
    commutes: bool


def accuracy_report(
    narrator_world: World,
    reader: ReaderState,
    correspondence: Mapping[str, str] | None = None,
) -> ConveyanceReport:
    """Compare each narrator atom's truth with the reader's decided beliefs.

    ``correspondence`` maps narrator relation names into the reader's
    universe (identity by default). Accuracy is matched/(matched+mismatched);
    a fully undetermined comparison counts as accurate (no evidence of
    error), so accuracy defaults to 1 when nothing is decided.
    """
    table = dict(correspondence) if correspondence else {}
    reader_universe = reader.fabula.universe
    matched = mismatched = undetermined = 0
    bad: list[Atom] = []
    for atom in narrator_world.universe.atoms:
        target = Atom(table.get(atom.relation, atom.relation), atom.args)
        reader_universe.check_atom(target)
        value = narrator_world.truth(atom)
        lit, anti = (target, Not(target)) if value else (Not(target), target)
        if lit in reader.beliefs:
            matched += 1
        elif anti in reader.beliefs:
            mismatched += 1
            bad.append(atom)
        else:
            undetermined += 1
    decided = matched + mismatched
    accuracy = Fraction(matched, decided) if decided else Fraction(1)
    return ConveyanceReport(
        matched=matched,
        mismatched=mismatched,
        undetermined=undetermined,
        accuracy=accuracy,
        mismatching_atoms=tuple(bad),
        commutes=mismatched == 0,
    )


def evolve(
    timeline: Timeline,
    channel: Channel,
    bound: int | None = None,
    warnings: list[str] | None = None,
) -> tuple[ReaderState, ...]:
    """Run the timeline through the channel, one reader state per step.

    Each step transmits the narrator's delta (additions and removals against
    the previous step; step 0 transmits the whole initial fabula), applies it
    to the reader's accumulated fabula, and re-enumerates the reader's
    worlds. The same per-formula channel rewrite applies to additions and
    removals alike. A step whose result is unsatisfiable raises
    InconsistentStepError naming the step.
    """
    states: list[ReaderState] = []
    reader_fab = Fabula(timeline.universe, ())
    prev = Fabula(timeline.universe, ())
    for t, fab in enumerate(timeline.steps):
        edit = delta(prev, fab)
        additions = _rewrite(edit.additions, channel, warnings, f"step t={t} additions")
        removals = _rewrite(edit.removals, channel, warnings, f"step t={t} removals")
        try:
            reader_fab = apply_transition(
                reader_fab, TransitionEdit(additions, removals), bound
            )
        except InconsistentFabulaError as e:
            raise InconsistentStepError(t, e.conflict) from e
        except ValueError as e:
            raise ChannelError(f"channel output conflicts at step t={t}: {e}") from e
        states.append(reconstruct(reader_fab, bound))
        prev = fab
    return tuple(states)
