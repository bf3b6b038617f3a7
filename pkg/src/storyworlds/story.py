"""Story file parsing and the timeline types built on it.

File format (UTF-8 text, ``#`` starts a comment anywhere on a line)::

    sort person: jay, ali
    rel wears(person, color)

    t=0:
    + wears(jay,blue)
    - wears(jay,red)

Declarations (``sort``, ``rel``) must precede the timeline blocks. Each
``t=k:`` block lists additions (``+``) and removals (``-``) relative to the
previous step; block labels must run 0, 1, 2, ... Formulas use ``name(args)``,
``!``, ``&``, ``|``, ``->``, parentheses, and the constants ``true`` and
``false``. Operator precedence, tightest first: ``!``, ``&``, ``|``, ``->``
(right-associative).

The serializer emits the same grammar bit-exactly for canonical timelines, so
``parse_story(serialize_timeline(t))`` reproduces ``t``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

from .errors import (
    InconsistentFabulaError,
    InconsistentStepError,
    ParseError,
    UniverseError,
    UniverseMismatchError,
    UnknownAtomError,
)
from .logic import (
    And,
    Atom,
    Constant,
    Formula,
    Implies,
    Not,
    Or,
    Universe,
    consistent,
)

_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_PRIMARY = 5


def _precedence(f: Formula) -> int:
    if isinstance(f, Implies):
        return _PREC_IMPLIES
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, Not):
        return _PREC_NOT
    return _PREC_PRIMARY


def formula_to_str(f: Formula) -> str:
    """Canonical textual form; the parser maps it back to an equal formula."""
    if isinstance(f, Atom):
        return f"{f.relation}({','.join(f.args)})"
    if isinstance(f, Constant):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "!" + _wrap(f.operand, _PREC_NOT)
    if isinstance(f, And):
        return " & ".join(_wrap(i, _PREC_AND + 1) for i in f.items)
    if isinstance(f, Or):
        return " | ".join(_wrap(i, _PREC_OR + 1) for i in f.items)
    if isinstance(f, Implies):
        left = _wrap(f.antecedent, _PREC_IMPLIES + 1)
        right = _wrap(f.consequent, _PREC_IMPLIES)
        return f"{left} -> {right}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, minimum: int) -> str:
    text = formula_to_str(f)
    return f"({text})" if _precedence(f) < minimum else text


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _FormulaParser:
    """Recursive-descent parser for a single formula string."""

    def __init__(self, text: str, universe: Universe, line: int, col_offset: int):
        self.text = text.split("#", 1)[0]
        self.universe = universe
        self.line = line
        self.col_offset = col_offset
        self.pos = 0

    def fail(self, message: str, pos: int | None = None):
        at = self.pos if pos is None else pos
        raise ParseError(message, self.line, self.col_offset + at + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos : self.pos + 2]

    def eat(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.eat(token):
            self.fail(f"expected '{token}'")

    def name(self) -> tuple[str, int]:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.fail("expected a name")
        self.pos = m.end()
        return m.group(), m.start()

    def parse(self) -> Formula:
        f = self.implication()
        self.skip_ws()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.eat("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        items = [self.conjunction()]
        while self.peek()[:1] == "|":
            self.eat("|")
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self) -> Formula:
        items = [self.unary()]
        while self.peek()[:1] == "&":
            self.eat("&")
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self) -> Formula:
        if self.eat("!"):
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        if self.eat("("):
            f = self.implication()
            self.expect(")")
            return f
        word, start = self.name()
        if word == "true":
            return Constant(True)
        if word == "false":
            return Constant(False)
        self.expect("(")
        args = [self.name()[0]]
        while self.eat(","):
            args.append(self.name()[0])
        self.expect(")")
        atom = Atom(word, tuple(args))
        try:
            self.universe.check_atom(atom)
        except UnknownAtomError as e:
            self.fail(str(e), start)
        return atom


def parse_formula(
    text: str, universe: Universe, line: int = 1, col_offset: int = 0
) -> Formula:
    """Parse one formula; atoms are validated against ``universe``."""
    return _FormulaParser(text, universe, line, col_offset).parse()


class Fabula:
    """A consistent, canonically ordered set of asserted propositions.

    Propositions are deduplicated and sorted lexicographically by their
    serialized form. Construction fails with InconsistentFabulaError (carrying
    a greedily minimized conflicting subset) when no world satisfies the set.
    Each proposition carries an importance flag, default true; the package
    records the flag and leaves its policy to callers.
    """

    __slots__ = ("universe", "propositions", "_set", "_unimportant")

    def __init__(
        self,
        universe: Universe,
        propositions: Iterable[Formula] = (),
        unimportant: Iterable[Formula] = (),
        bound: int | None = None,
    ):
        for f in propositions:
            universe.check_formula(f)
        ordered = sorted(set(propositions), key=formula_to_str)
        if not consistent(ordered, universe, bound):
            conflict = _minimal_conflict(ordered, universe, bound)
            raise InconsistentFabulaError(
                conflict,
                "inconsistent fabula; conflicting subset: "
                + ", ".join(formula_to_str(f) for f in conflict),
            )
        self.universe = universe
        self.propositions: tuple[Formula, ...] = tuple(ordered)
        self._set = frozenset(ordered)
        self._unimportant = frozenset(unimportant) & self._set

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.propositions)

    def __len__(self) -> int:
        return len(self.propositions)

    def __contains__(self, f: Formula) -> bool:
        return f in self._set

    def as_set(self) -> frozenset:
        return self._set

    def is_important(self, f: Formula) -> bool:
        return f in self._set and f not in self._unimportant

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Fabula)
            and self.universe == other.universe
            and self.propositions == other.propositions
            and self._unimportant == other._unimportant
        )

    def __hash__(self) -> int:
        return hash((self.universe, self.propositions, self._unimportant))

    def __repr__(self) -> str:
        inner = ", ".join(formula_to_str(f) for f in self.propositions)
        return f"Fabula({{{inner}}})"


def _minimal_conflict(
    props: list, universe: Universe, bound: int | None
) -> tuple:
    core = list(props)
    for f in list(core):
        trial = [g for g in core if g is not f]
        if not consistent(trial, universe, bound):
            core = trial
    return tuple(core)


@dataclass(frozen=True)
class TransitionEdit:
    """A fabula edit: formulas to add and formulas to retract."""

    additions: frozenset
    removals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "additions", frozenset(self.additions))
        object.__setattr__(self, "removals", frozenset(self.removals))
        overlap = self.additions & self.removals
        if overlap:
            names = ", ".join(sorted(formula_to_str(f) for f in overlap))
            raise ValueError(f"add/remove conflict: {names}")


def delta(prev: Fabula, next_: Fabula) -> TransitionEdit:
    """Exact set difference between adjacent fabulas (additions and removals)."""
    if prev.universe != next_.universe:
        raise UniverseMismatchError("fabulas belong to different universes")
    return TransitionEdit(
        additions=next_.as_set() - prev.as_set(),
        removals=prev.as_set() - next_.as_set(),
    )


def apply_transition(
    fabula: Fabula, edit: TransitionEdit, bound: int | None = None
) -> Fabula:
    """Apply ``edit`` to ``fabula``: remove, then add, then re-canonicalize.

    Raises InconsistentFabulaError when the result has no satisfying world.
    Removing an absent formula is a no-op.
    """
    props = (fabula.as_set() - edit.removals) | edit.additions
    unimportant = {f for f in props if f in fabula and not fabula.is_important(f)}
    return Fabula(fabula.universe, props, unimportant, bound)


@dataclass(frozen=True)
class Timeline:
    """A universe plus the fabula at each time step, F(0..T)."""

    universe: Universe
    steps: tuple[Fabula, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("empty timeline")
        for fab in self.steps:
            if fab.universe != self.universe:
                raise UniverseMismatchError("timeline step over a different universe")


_SORT_RE = re.compile(r"sort\s+([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")
_REL_RE = re.compile(
    r"rel\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*([^)]*)\s*\)\s*$"
)
_BLOCK_RE = re.compile(r"t\s*=\s*(\d+)\s*:\s*$")


def parse_story(source: str | TextIO, bound: int | None = None) -> Timeline:
    """Parse a story file into a Timeline.

    Diagnostics carry line and column. Raises ParseError for syntax and
    naming problems (including an empty timeline and add/remove conflicts)
    and InconsistentStepError when a step's accumulated fabula is
    unsatisfiable.
    """
    text = source.read() if hasattr(source, "read") else source
    sorts: dict[str, tuple[str, ...]] = {}
    relations: list[tuple[str, tuple[str, ...]]] = []
    universe: Universe | None = None

    blocks: list[tuple[int, int, list[tuple[str, Formula, int]]]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())

        if stripped.startswith("sort ") or stripped == "sort":
            if universe is not None:
                raise ParseError(
                    "declarations must precede timeline blocks", line_no, indent + 1
                )
            m = _SORT_RE.match(stripped)
            if not m:
                raise ParseError("malformed sort declaration", line_no, indent + 1)
            name, rest = m.group(1), m.group(2)
            if name in sorts:
                raise ParseError(f"duplicate sort '{name}'", line_no, indent + 1)
            constants = tuple(c.strip() for c in rest.split(",") if c.strip())
            if not constants or not all(_NAME_RE.fullmatch(c) for c in constants):
                raise ParseError(
                    f"sort '{name}' needs a comma-separated list of names",
                    line_no,
                    indent + 1,
                )
            sorts[name] = constants
            continue

        if stripped.startswith("rel ") or stripped == "rel":
            if universe is not None:
                raise ParseError(
                    "declarations must precede timeline blocks", line_no, indent + 1
                )
            m = _REL_RE.match(stripped)
            if not m:
                raise ParseError("malformed rel declaration", line_no, indent + 1)
            name, rest = m.group(1), m.group(2)
            arg_sorts = tuple(s.strip() for s in rest.split(",") if s.strip())
            if not arg_sorts or not all(_NAME_RE.fullmatch(s) for s in arg_sorts):
                raise ParseError(
                    f"relation '{name}' needs a comma-separated sort list",
                    line_no,
                    indent + 1,
                )
            relations.append((name, arg_sorts))
            continue

        m = _BLOCK_RE.match(stripped)
        if m:
            if universe is None:
                try:
                    universe = Universe(sorts, relations)
                except UniverseError as e:
                    raise ParseError(str(e), line_no, indent + 1) from None
            k = int(m.group(1))
            if k != len(blocks):
                raise ParseError(
                    f"expected block t={len(blocks)}, got t={k}", line_no, indent + 1
                )
            blocks.append((k, line_no, []))
            continue

        if stripped[0] in "+-":
            if not blocks:
                raise ParseError(
                    "assertion outside any t= block", line_no, indent + 1
                )
            sign = stripped[0]
            body = stripped[1:]
            f = parse_formula(body, universe, line_no, indent + 1)
            blocks[-1][2].append((sign, f, line_no))
            continue

        raise ParseError(f"unrecognized line: '{stripped}'", line_no, indent + 1)

    if not blocks:
        raise ParseError("empty timeline: no t= blocks", len(text.splitlines()) + 1, 1)

    assert universe is not None
    steps: list[Fabula] = []
    fab = Fabula(universe, (), bound=bound)
    for k, block_line, entries in blocks:
        additions = {f for sign, f, _ in entries if sign == "+"}
        removals = {f for sign, f, _ in entries if sign == "-"}
        overlap = additions & removals
        if overlap:
            first = min(formula_to_str(f) for f in overlap)
            raise ParseError(f"add/remove conflict on '{first}'", block_line, 1)
        try:
            fab = apply_transition(fab, TransitionEdit(additions, removals), bound)
        except InconsistentFabulaError as e:
            raise InconsistentStepError(k, e.conflict, block_line) from e
        steps.append(fab)

    return Timeline(universe, tuple(steps))


def serialize_timeline(timeline: Timeline) -> str:
    """Canonical story-file text; round-trips through parse_story exactly."""
    out: list[str] = []
    for name, constants in timeline.universe.sorts.items():
        out.append(f"sort {name}: {', '.join(constants)}")
    for rel, arg_sorts in timeline.universe.relations.items():
        out.append(f"rel {rel}({', '.join(arg_sorts)})")
    prev = Fabula(timeline.universe, ())
    for k, fab in enumerate(timeline.steps):
        out.append("")
        out.append(f"t={k}:")
        edit = delta(prev, fab)
        for f in sorted(edit.additions, key=formula_to_str):
            out.append(f"+ {formula_to_str(f)}")
        for f in sorted(edit.removals, key=formula_to_str):
            out.append(f"- {formula_to_str(f)}")
        prev = fab
    return "\n".join(out) + "\n"
