"""Emptiness and membership for nondeterministic parity tree automata.

Both questions are answered by boolean instances of the priority-indexed
equational system: one equation per priority class ``X_i``, least fixed
points for odd ``i`` and greatest for even ``i``, ordered by increasing
priority.  The right-hand side is the one-step existential operator "some
transition from here lands in the current sets".  Nullary transitions
satisfy it unconditionally, since finite branches are accepting.
"""
from __future__ import annotations

from dataclasses import dataclass

from .fixpoint import MU, NU, Equation, EquationalSystem, Powerset, SolverPolicy, solve
from .model import NONDET, STAR, Automaton, RegularTree

_EXACT = SolverPolicy.exact()


def _polarity(i):
    # classes are numbered from 1
    return MU if i % 2 else NU


def _check_kind(a):
    if a.kind != NONDET:
        raise ValueError(f"expected a nondet automaton, got kind {a.kind!r}")


@dataclass(frozen=True)
class AcceptingStateSet:
    """States from which some accepting run exists, split by priority class."""

    classes: tuple[frozenset, ...]

    @property
    def states(self) -> frozenset:
        return frozenset().union(*self.classes)

    def __contains__(self, x):
        return any(x in c for c in self.classes)

    def __iter__(self):
        return iter(sorted(self.states))

    def __len__(self):
        return len(self.states)


def state_system(a: Automaton) -> EquationalSystem:
    """The boolean system over ``P(X_1) x ... x P(X_n)`` whose solution is the set of accepting states."""
    _check_kind(a)
    classes = a.priority_classes()

    def make(cls):
        def f(sets):
            live = frozenset().union(*sets)
            return frozenset(x for x in cls
                             if any(all(y in live for y in t.targets) for t in a.transitions[x]))
        return f

    return EquationalSystem(
        [Equation(f"u{i}", _polarity(i), Powerset(cls), make(cls))
         for i, cls in enumerate(classes, 1)])


def accepting_states(a: Automaton) -> AcceptingStateSet:
    sol = solve(state_system(a), _EXACT)
    return AcceptingStateSet(tuple(sol.values))


def nonempty(a: Automaton) -> bool:
    """Does ``a`` accept at least one tree?"""
    _check_kind(a)
    return bool(a.initial_states & accepting_states(a).states)


def product_system(a: Automaton, t: RegularTree) -> EquationalSystem:
    """Boolean system over sets of ``(tree node, state)`` pairs, one equation per priority class.

    ``(v, x)`` is in the solution iff ``a`` started in ``x`` has an
    accepting run over the unfolding of ``t`` from node ``v``.
    """
    _check_kind(a)
    bad = t.violations(a.alphabet)
    if bad:
        raise ValueError("tree does not match the automaton's alphabet: " + "; ".join(bad))
    if any(sym == STAR for sym, _ in t.nodes.values()):
        raise ValueError("membership needs a total tree (no '*' leaves)")
    nodes = sorted(t.reachable())
    classes = a.priority_classes()
    options = {}
    for v in nodes:
        sym, kids = t.nodes[v]
        for x in a.states:
            options[v, x] = [tuple(zip(kids, tr.targets)) for tr in a.delta(x, sym)]

    def make(pairs):
        def f(sets):
            live = frozenset().union(*sets)
            return frozenset(p for p in pairs
                             if any(all(q in live for q in opt) for opt in options[p]))
        return f

    eqs = []
    for i, cls in enumerate(classes, 1):
        pairs = tuple((v, x) for v in nodes for x in cls)
        eqs.append(Equation(f"u{i}", _polarity(i), Powerset(pairs), make(pairs)))
    return EquationalSystem(eqs)


def member(a: Automaton, t: RegularTree) -> bool:
    """Is the unfolding of ``t`` accepted by ``a``?"""
    sol = solve(product_system(a, t), _EXACT)
    good = frozenset().union(*sol.values)
    return any((t.root, x) in good for x in a.initial_states)
