"""Information metrics over world sets and reader-state series.

Proportions are exact fractions throughout; entropies and relevance values
are floats in bits. Coherence measures follow the proportion form: the world
coherence of a question set over a sampled world set is the mean truth
proportion of its implications, and transitional coherence is the same mean
taken at an earlier time against questions pulled back through a kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .conveyance import ReaderState
from .errors import EmptyWorldSetError, MetricError
from .logic import (
    Atom,
    Formula,
    Implies,
    Not,
    Universe,
    World,
    check_bound,
    evaluate,
    truth_column,
)
from .story import formula_to_str
from .worlds import WorldSet, truth_proportion


def binary_entropy(p: Fraction | float | int) -> float:
    """Binary entropy of ``p`` in bits, with the 0*log0 = 0 convention."""
    if not 0 <= p <= 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p == 0 or p == 1:
        return 0.0
    pf = float(p)
    return -(pf * math.log2(pf) + (1.0 - pf) * math.log2(1.0 - pf))


@dataclass(frozen=True)
class Question:
    """A conditional question "if A then B" with optional true answers.

    When ``answers`` is absent, the true answers can be resolved against a
    designated ground-truth world; no defaults are invented.
    """

    antecedent: Formula
    consequent: Formula
    answers: tuple[bool, bool] | None = None

    def materialize(self) -> Formula:
        """The question as the implication formula A -> B."""
        return Implies(self.antecedent, self.consequent)

    def resolve_answers(self, truth: World | None = None) -> tuple[bool, bool]:
        if self.answers is not None:
            return self.answers
        if truth is None:
            raise MetricError(
                "question has no recorded answers and no ground-truth world was given"
            )
        return (evaluate(truth, self.antecedent), evaluate(truth, self.consequent))

    def __str__(self) -> str:
        return f"{formula_to_str(self.antecedent)} -> {formula_to_str(self.consequent)}"


def relevance(q: Question, prior: WorldSet, truth: World | None = None) -> float:
    """Entropy reduction the consequent gains from the antecedent, in bits.

    Computed as H(p) - H(p') where p is the prior proportion of worlds
    agreeing with the antecedent's true answer and p' is the proportion
    agreeing with the consequent's true answer among those worlds. Positive
    values mean the antecedent genuinely informs the consequent; independence
    yields exactly zero because both proportions coincide.
    """
    if len(prior) == 0:
        raise EmptyWorldSetError("relevance needs a non-empty prior")
    a, b = q.resolve_answers(truth)
    ind_a = q.antecedent if a else Not(q.antecedent)
    p_a = truth_proportion(prior, ind_a)
    sub_masks = [w.mask for w in prior if evaluate(w, ind_a)]
    if not sub_masks:
        raise MetricError(
            "empty conditional sub-population: no prior world matches the antecedent's answer"
        )
    sub = WorldSet(prior.universe, sub_masks)
    ind_b = q.consequent if b else Not(q.consequent)
    p_b_given_a = truth_proportion(sub, ind_b)
    return binary_entropy(p_a) - binary_entropy(p_b_given_a)


def world_coherence(sample: WorldSet, questions: Iterable[Question]) -> Fraction:
    """Mean truth proportion of the questions' implications over the sample."""
    qs = tuple(questions)
    if not qs:
        raise MetricError("world coherence needs a non-empty question set")
    if len(sample) == 0:
        raise EmptyWorldSetError("world coherence over an empty sample")
    total = sum(
        (truth_proportion(sample, q.materialize()) for q in qs), Fraction(0)
    )
    return total / len(qs)


def mean_question_entropy(sample: WorldSet, questions: Iterable[Question]) -> float:
    """Companion value: mean binary entropy of the per-question proportions."""
    qs = tuple(questions)
    if not qs:
        raise MetricError("mean question entropy needs a non-empty question set")
    return sum(
        binary_entropy(truth_proportion(sample, q.materialize())) for q in qs
    ) / len(qs)


def derive_world_questions(
    sample: WorldSet, max_questions: int = 64
) -> tuple[Question, ...]:
    """Derive coherence questions from a sample of worlds.

    Antecedents are ground literals every sampled world agrees on; consequents
    are literals a strict majority (but not all) of the sample holds. Pairs
    are taken in canonical order and capped at ``max_questions``.
    """
    if len(sample) == 0:
        raise EmptyWorldSetError("cannot derive questions from an empty sample")
    total = len(sample)
    unanimous: list[Formula] = []
    majority: list[Formula] = []
    for atom in sample.universe.atoms:
        hits = sum(1 for w in sample if evaluate(w, atom))
        for lit, count in ((atom, hits), (Not(atom), total - hits)):
            if count == total:
                unanimous.append(lit)
            elif 2 * count > total:
                majority.append(lit)
    unanimous.sort(key=formula_to_str)
    majority.sort(key=formula_to_str)
    out = []
    for a in unanimous:
        for b in majority:
            out.append(Question(a, b, (True, True)))
            if len(out) >= max_questions:
                return tuple(out)
    return tuple(out)


@dataclass(frozen=True)
class BooleanLattice:
    """Entailment DAG over equivalence classes of formulas.

    ``classes`` lists each equivalence class (formulas with identical truth
    tables), canonically ordered; ``edges`` holds every pair (i, j) with
    class i entailing class j, i.e. the full transitive closure of the
    order. ``sources`` are the classes no other class entails.
    """

    classes: tuple[tuple[Formula, ...], ...]
    edges: frozenset
    sources: tuple[int, ...]

    def transitive_reduction(self) -> frozenset:
        """Edges minus those implied by two-step paths (for display)."""
        redundant = {
            (i, j)
            for (i, j) in self.edges
            for (a, k) in self.edges
            if a == i and k != j and (k, j) in self.edges
        }
        return frozenset(self.edges - redundant)


def boolean_lattice(
    formulas: Iterable[Formula], universe: Universe, bound: int | None = None
) -> BooleanLattice:
    """Group formulas by logical equivalence and wire entailment edges.

    Equivalence and entailment are decided by exhaustive truth tables, so the
    universe must fit the enumeration bound. Collapsing equivalent formulas
    into one vertex keeps the graph acyclic.
    """
    check_bound(universe, bound)
    by_column: dict[int, list[Formula]] = {}
    for f in formulas:
        by_column.setdefault(truth_column(f, universe), []).append(f)
    grouped = []
    for col, members in by_column.items():
        members = sorted(set(members), key=formula_to_str)
        grouped.append((formula_to_str(members[0]), col, tuple(members)))
    grouped.sort()
    columns = [col for _, col, _ in grouped]
    classes = tuple(members for _, _, members in grouped)
    edges = frozenset(
        (i, j)
        for i in range(len(columns))
        for j in range(len(columns))
        if i != j and columns[i] & ~columns[j] == 0
    )
    targets = {j for _, j in edges}
    sources = tuple(i for i in range(len(classes)) if i not in targets)
    return BooleanLattice(classes=classes, edges=edges, sources=sources)


@dataclass(frozen=True)
class KernelStep:
    """Belief churn at one step: the fraction of the literal beliefs that
    changed arriving here, and whether that crosses the kernel threshold."""

    step: int
    changed_fraction: Fraction
    is_kernel: bool


@dataclass(frozen=True)
class SatelliteLink:
    kernel_step: int
    satellite_step: int
    mean_relevance: float
    question_count: int


@dataclass(frozen=True)
class KernelReport:
    steps: tuple[KernelStep, ...]
    theta: Fraction
    satellites: tuple[SatelliteLink, ...] = ()

    @property
    def kernels(self) -> tuple[int, ...]:
        return tuple(s.step for s in self.steps if s.is_kernel)


def detect_kernels(
    states: Sequence[ReaderState], theta: Fraction | float = Fraction(1, 2)
) -> KernelReport:
    """Flag steps where the majority of decided beliefs changed.

    The changed fraction arriving at step t is |B(t-1) xor B(t)| over
    |B(t-1) union B(t)| (at least 1), computed over ground literals; a step
    is a kernel when the fraction strictly exceeds ``theta``. Step 0 is never
    a kernel.
    """
    if len(states) < 2:
        raise MetricError("kernel detection needs at least two reader states")
    theta = Fraction(theta)
    steps = [KernelStep(0, Fraction(0), False)]
    for t in range(1, len(states)):
        before, after = states[t - 1].beliefs, states[t].beliefs
        changed = before ^ after
        union = before | after
        fraction = Fraction(len(changed), max(1, len(union)))
        steps.append(KernelStep(t, fraction, fraction > theta))
    return KernelReport(steps=tuple(steps), theta=theta)


def kernel_questions(
    states: Sequence[ReaderState],
    kernel_step: int,
    restrict: Mapping[Atom, bool] | None = None,
    max_questions: int = 64,
) -> tuple[Question, ...]:
    """Questions a kernel poses: pre-kernel beliefs implying the beliefs the
    kernel newly decided.

    Antecedents range over B(k-1), consequents over B(k) minus B(k-1); both
    in canonical order, capped. ``restrict`` (a partial atom assignment)
    drops consequents that contradict it. Answers are (true, true) by
    construction: both sides are held beliefs on their own side of the
    kernel.
    """
    if not 1 <= kernel_step < len(states):
        raise MetricError(f"kernel step {kernel_step} outside the state series")
    before = states[kernel_step - 1].beliefs
    after = states[kernel_step].beliefs
    antecedents = sorted(before, key=formula_to_str)
    consequents = sorted(after - before, key=formula_to_str)
    if restrict is not None:
        consequents = [c for c in consequents if _consistent_with(c, restrict)]
    out = []
    for a in antecedents:
        for b in consequents:
            out.append(Question(a, b, (True, True)))
            if len(out) >= max_questions:
                return tuple(out)
    return tuple(out)


def _consistent_with(literal: Formula, restrict: Mapping[Atom, bool]) -> bool:
    if isinstance(literal, Not) and isinstance(literal.operand, Atom):
        atom, value = literal.operand, False
    elif isinstance(literal, Atom):
        atom, value = literal, True
    else:
        return True
    return atom not in restrict or restrict[atom] == value


def classify_satellites(
    states: Sequence[ReaderState],
    report: KernelReport,
    epsilon: float = 0.0,
    max_questions: int = 64,
) -> KernelReport:
    """Label non-kernel steps as satellites of the kernels they support.

    A step s (1 <= s < k, not itself a kernel) is a satellite of kernel k
    when the mean relevance of k's question set, taken with the reader's
    world set at s as the prior, strictly exceeds ``epsilon``. Questions
    whose conditional sub-population is empty at s are skipped; a step with
    no evaluable question is not a satellite. Kernels need no satellites.
    """
    links: list[SatelliteLink] = []
    kernel_steps = set(report.kernels)
    for k in report.kernels:
        questions = kernel_questions(states, k, max_questions=max_questions)
        if not questions:
            continue
        for s in range(1, k):
            if s in kernel_steps:
                continue
            prior = states[s].worlds
            values = []
            for q in questions:
                try:
                    values.append(relevance(q, prior))
                except MetricError:
                    continue
            if not values:
                continue
            mean = sum(values) / len(values)
            if mean > epsilon:
                links.append(SatelliteLink(k, s, mean, len(values)))
    links.sort(key=lambda l: (l.kernel_step, l.satellite_step))
    return replace(report, satellites=tuple(links))


def pullback_restriction(truth_now: World, sample_then: WorldSet) -> dict[Atom, bool]:
    """Restrict a later ground-truth world to the atoms the earlier sample
    already decides (the maximal view of the truth visible at the earlier
    time)."""
    if len(sample_then) == 0:
        raise EmptyWorldSetError("pullback over an empty sample")
    out: dict[Atom, bool] = {}
    for atom in truth_now.universe.atoms:
        values = {evaluate(w, atom) for w in sample_then}
        if len(values) == 1:
            out[atom] = truth_now.truth(atom)
    return out


def transitional_coherence(
    sample_then: WorldSet,
    truth_now: World,
    kernels: KernelReport | None = None,
    questions: Iterable[Question] | None = None,
    *,
    t_then: int | None = None,
    t_now: int | None = None,
    states: Sequence[ReaderState] | None = None,
    max_questions: int = 64,
) -> Fraction:
    """Mean truth proportion, over the earlier sample, of questions that span
    a kernel.

    With an explicit question set this is a plain coherence evaluation at the
    earlier time. Otherwise questions are derived: for each kernel k in
    (t_then, t_now], antecedents are pre-kernel beliefs and consequents are
    newly decided post-kernel beliefs consistent with the later ground truth
    pulled back to the atoms ``sample_then`` decides. Derivation requires
    t_then < t_now, at least one kernel in range, and a non-empty derived
    set.
    """
    if questions is not None:
        qs = tuple(questions)
        if not qs:
            raise MetricError("transitional coherence needs a non-empty question set")
        return world_coherence(sample_then, qs)

    if kernels is None or states is None or t_then is None or t_now is None:
        raise MetricError(
            "deriving questions needs kernels=, states=, t_then= and t_now="
        )
    if not t_then < t_now:
        raise MetricError("question derivation needs t_then < t_now")
    in_range = [k for k in kernels.kernels if t_then < k <= t_now]
    if not in_range:
        raise MetricError(f"no kernel in ({t_then}, {t_now}]")
    restrict = pullback_restriction(truth_now, sample_then)
    qs = []
    for k in in_range:
        remaining = max_questions - len(qs)
        if remaining <= 0:
            break
        qs.extend(kernel_questions(states, k, restrict, remaining))
    if not qs:
        raise MetricError("derived question set is empty")
    return world_coherence(sample_then, qs)
