from __future__ import annotations

import random

import pytest

from storyworlds.errors import BoundExceededError, UniverseError, UnknownAtomError
from storyworlds.logic import (
    Atom,
    Constant,
    Implies,
    Not,
    Or,
    Universe,
    World,
    consistent,
    entails,
    evaluate,
    ground_atoms,
)
from storyworlds.story import formula_to_str

from helpers import chain_universe, random_formula, random_universe

CARDS_ATOM_ORDER = [
    "plays(ali,ali)",
    "plays(ali,jay)",
    "plays(jay,ali)",
    "plays(jay,jay)",
    "wears(ali,blue)",
    "wears(ali,red)",
    "wears(jay,blue)",
    "wears(jay,red)",
]


class TestGroundAtoms:
    def test_cards_universe_has_eight_atoms(self, cards_universe):
        assert len(ground_atoms(cards_universe)) == 8

    def test_canonical_order_is_pinned(self, cards_universe):
        # golden: lexicographic by relation name, then argument tuple
        assert [formula_to_str(a) for a in ground_atoms(cards_universe)] == CARDS_ATOM_ORDER

    def test_no_relations_means_no_atoms(self):
        u = Universe({"person": ("jay",)}, [])
        assert ground_atoms(u) == ()

    def test_single_atom_universe(self):
        u = Universe(
            {"person": ("jay",), "color": ("blue",)},
            [("wears", ("person", "color"))],
        )
        assert [formula_to_str(a) for a in ground_atoms(u)] == ["wears(jay,blue)"]

    def test_atom_count_matches_arity_products(self):
        u = Universe(
            {"a": ("x", "y", "z"), "b": ("p", "q")},
            [("r1", ("a", "b")), ("r2", ("b", "b", "a"))],
        )
        assert u.atom_count == 3 * 2 + 2 * 2 * 3

    def test_universe_rejects_duplicate_constants(self):
        with pytest.raises(UniverseError):
            Universe({"s": ("a", "a")}, [])

    def test_universe_rejects_zero_arity(self):
        with pytest.raises(UniverseError):
            Universe({"s": ("a",)}, [("p", ())])

    def test_universe_rejects_unknown_sort(self):
        with pytest.raises(UniverseError):
            Universe({"s": ("a",)}, [("p", ("t",))])


class TestEvaluate:
    def test_asserted_atom_is_true(self, cards_universe):
        atom = cards_universe.atom("wears", "jay", "blue")
        world = World(cards_universe, 1 << cards_universe.atom_index(atom))
        assert evaluate(world, atom)

    def test_excluded_middle_holds_everywhere(self, cards_universe):
        p = cards_universe.atom("plays", "ali", "jay")
        for mask in (0, 5, 255):
            assert evaluate(World(cards_universe, mask), Or((p, Not(p))))

    def test_implication_with_false_consequent(self, cards_universe, worlds_s0):
        plays = cards_universe.atom("plays", "ali", "jay")
        wears = cards_universe.atom("wears", "ali", "blue")
        world = next(
            w for w in worlds_s0 if w.truth(plays) and not w.truth(wears)
        )
        assert evaluate(world, Implies(plays, wears)) is False

    def test_constants(self, cards_universe):
        w = World(cards_universe, 0)
        assert evaluate(w, Constant(True)) and not evaluate(w, Constant(False))

    def test_unknown_atom_is_a_structured_error(self, cards_universe):
        w = World(cards_universe, 0)
        with pytest.raises(UnknownAtomError):
            evaluate(w, Atom("sings", ("jay",)))
        with pytest.raises(UnknownAtomError):
            evaluate(w, Atom("wears", ("jay",)))  # wrong arity

    def test_deterministic(self, cards_universe):
        rng = random.Random(11)
        for _ in range(50):
            f = random_formula(rng, cards_universe, 3)
            w = World(cards_universe, rng.randrange(256))
            assert evaluate(w, f) == evaluate(w, f)


class TestConsistent:
    def test_contradiction(self, cards_universe):
        p = cards_universe.atom("wears", "jay", "blue")
        assert not consistent([p, Not(p)], cards_universe)

    def test_fixture_fabula(self, cards_universe, fabula_f1):
        assert consistent(fabula_f1.propositions, cards_universe)

    def test_empty_set(self, cards_universe):
        assert consistent([], cards_universe)

    def test_bound_refusal_names_the_bound(self):
        u = chain_universe(25)
        with pytest.raises(BoundExceededError) as exc:
            consistent([], u)
        assert "25" in str(exc.value) and "24" in str(exc.value)

    def test_explicit_bound_overrides_default(self):
        u = chain_universe(10)
        with pytest.raises(BoundExceededError):
            consistent([], u, bound=8)
        assert consistent([], u, bound=10)


class TestEntails:
    def test_modus_ponens(self, cards_universe):
        a = cards_universe.atom("wears", "jay", "blue")
        b = cards_universe.atom("plays", "ali", "jay")
        assert entails([a, Implies(a, b)], b, cards_universe)

    def test_fixture_does_not_entail_unasserted_atom(self, cards_universe, fabula_f1):
        assert not entails(
            fabula_f1.propositions,
            cards_universe.atom("wears", "ali", "blue"),
            cards_universe,
        )

    def test_tautology_always_entailed(self, cards_universe):
        p = cards_universe.atom("plays", "jay", "jay")
        q = cards_universe.atom("wears", "ali", "red")
        assert entails([q], Or((p, Not(p))), cards_universe)
        assert entails([], Or((p, Not(p))), cards_universe)

    def test_entailment_matches_inconsistency_of_negation(self):
        rng = random.Random(23)
        for _ in range(60):
            u = random_universe(rng, 8)
            props = [random_formula(rng, u, 2) for _ in range(rng.randrange(0, 3))]
            q = random_formula(rng, u, 2)
            assert entails(props, q, u) == (
                not consistent(list(props) + [Not(q)], u)
            )
