import random
from pathlib import Path

import pytest

from generators import random_nondet, random_tree
from paritytrace.fixpoint import MU, NU, SolverPolicy, is_fixed_point, solve
from paritytrace.model import (NONDET, Automaton, RegularTree, Transition, parse_automaton,
                               parse_tree_file)
from paritytrace.nondet import accepting_states, member, nonempty, product_system, state_system
from paritytrace.oracles import positional_member, positional_nonempty

FIXTURES = Path(__file__).parent / "fixtures"


def load(name):
    return parse_automaton((FIXTURES / name).read_text())


def tree(name):
    return parse_tree_file((FIXTURES / name).read_text())


def test_t1_accepts_from_its_state():
    assert set(accepting_states(load("t1.aut"))) == {"x"}


def test_odd_loop_accepts_nothing():
    a = load("aloop.aut")
    assert set(accepting_states(a)) == set()
    assert not nonempty(a)


def test_a1_both_states_accept():
    a = load("a1.aut")
    acc = accepting_states(a)
    assert set(acc) == {"x1", "x2"}
    assert acc.classes == (frozenset({"x1"}), frozenset({"x2"}))
    assert nonempty(a)


def test_empty_initial_set():
    a = load("a1.aut")
    b = Automaton(a.alphabet, a.priority, a.transitions, [], NONDET)
    assert not nonempty(b)


@pytest.mark.parametrize("aut, tr, expected", [
    ("a1.aut", "ab.tree", True),
    ("a1.aut", "aomega.tree", False),
    ("t1.aut", "ok.tree", True),
    ("aloop.aut", "aomega.tree", False),
])
def test_membership_examples(aut, tr, expected):
    a, t = load(aut), tree(tr)
    assert member(a, t) is expected
    assert positional_member(a, t) is expected


def test_state_system_shape():
    system = state_system(load("a1.aut"))
    assert [e.polarity for e in system] == [MU, NU]
    sol = solve(system, SolverPolicy.exact())
    assert is_fixed_point(system, sol)


def test_kind_and_alphabet_checks():
    with pytest.raises(ValueError):
        accepting_states(load("coin.aut"))
    with pytest.raises(ValueError):
        member(load("a1.aut"), RegularTree({"n": ("zz", ["n"])}, "n"))
    with pytest.raises(ValueError):
        member(load("a1.aut"), RegularTree({"n": ("*", [])}, "n"))


def test_product_system_covers_all_pairs():
    a, t = load("a1.aut"), tree("ab.tree")
    system = product_system(a, t)
    assert len(system) == a.num_priorities
    assert sum(len(e.lattice.carrier) for e in system) == len(t.nodes) * len(a.states)


def shifted(a, by):
    return Automaton(a.alphabet, {x: p + by for x, p in a.priority.items()}, a.transitions,
                     a.initial_states, NONDET)


@pytest.mark.parametrize("seed", range(150))
def test_random_properties(seed):
    rng = random.Random(seed)
    a = random_nondet(rng, max_priority=rng.choice([2, 4]))
    t = random_tree(rng, a.alphabet)
    m = member(a, t)
    ne = nonempty(a)
    assert ne == positional_nonempty(a)
    if m:
        assert ne
    if max(a.priority.values()) <= 2:
        b = shifted(a, 2)
        assert member(b, t) == m and nonempty(b) == ne
    # adding a transition never loses an accepting state
    x = rng.choice(a.states)
    sym = rng.choice(list(a.alphabet))
    extra = Transition(sym, tuple(rng.choice(a.states) for _ in range(a.alphabet[sym])))
    trans = {y: list(ts) for y, ts in a.transitions.items()}
    if extra not in trans[x]:
        trans[x].append(extra)
    bigger = Automaton(a.alphabet, a.priority, trans, a.initial_states, NONDET)
    assert set(accepting_states(a)) <= set(accepting_states(bigger))
