"""Nondeterministic and probabilistic parity tree automata."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .trees import STAR, PartialRun, RankedAlphabet, RunGraph

NONDET = "nondet"
PROB = "prob"

MASS_SLACK = 1e-9


@dataclass(frozen=True)
class Transition:
    """One element ``(symbol, (x_1, ..., x_k))`` of ``delta(x)``; ``prob`` is None for nondet."""

    symbol: str
    targets: tuple[str, ...]
    prob: float | None = None

    def __str__(self):
        body = f"{self.symbol}({','.join(self.targets)})"
        return body if self.prob is None else f"{body}:{self.prob:.12g}"


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    detail: str = ""

    def __str__(self):
        text = f"{self.code} at {self.where}"
        return f"{text}: {self.detail}" if self.detail else text


class Automaton:
    """A parity tree automaton over a ranked alphabet.

    Parameters
    ----------
    alphabet : RankedAlphabet
    states : mapping state -> priority (positive int), in declaration order
    transitions : mapping state -> iterable of :class:`Transition`; states
        without an entry have no transitions (they diverge)
    initial : for ``kind="nondet"`` an iterable of states; for ``"prob"`` a
        mapping state -> probability (missing mass is divergence)
    kind : ``"nondet"`` or ``"prob"``

    The constructor only checks what is needed to build the object; call
    :func:`validate` for the full list of problems.
    """

    def __init__(self, alphabet, states: Mapping[str, int], transitions, initial,
                 kind=NONDET, name=""):
        if kind not in (NONDET, PROB):
            raise ValueError(f"kind must be {NONDET!r} or {PROB!r}")
        self.kind = kind
        self.name = name
        self.alphabet = alphabet if isinstance(alphabet, RankedAlphabet) else RankedAlphabet(alphabet)
        self.priority = dict(states)
        self.states = tuple(self.priority)
        self.transitions = {x: tuple(transitions.get(x, ())) for x in self.states}
        # transitions for undeclared states are kept so validate() can flag them
        self._stray = {x: tuple(ts) for x, ts in transitions.items() if x not in self.priority}
        if kind == PROB:
            self.initial = {x: float(p) for x, p in dict(initial).items()}
        else:
            if isinstance(initial, Mapping):
                initial = [x for x, v in initial.items() if v]
            self.initial = {x: 1.0 for x in initial}
        self._compressed = compress_priorities(self.priority)

    @property
    def is_prob(self):
        return self.kind == PROB

    @property
    def initial_states(self) -> frozenset:
        return frozenset(x for x, p in self.initial.items() if p > 0)

    def compressed_priority(self, x) -> int:
        return self._compressed[x]

    @property
    def num_priorities(self) -> int:
        return max(self._compressed.values(), default=0)

    def priority_classes(self) -> list[tuple[str, ...]]:
        """``[X_1, ..., X_n]`` after compressing priorities to ``1..n`` (classes may be empty)."""
        n = self.num_priorities
        return [tuple(x for x in self.states if self._compressed[x] == i)
                for i in range(1, n + 1)]

    def delta(self, x, symbol=None):
        ts = self.transitions[x]
        return ts if symbol is None else tuple(t for t in ts if t.symbol == symbol)

    def mass(self, x) -> float:
        return sum(t.prob for t in self.transitions[x])

    def with_initial(self, state) -> "Automaton":
        """Copy with the Dirac initial distribution at ``state``."""
        if state not in self.priority:
            raise KeyError(f"unknown state {state!r}")
        init = {state: 1.0} if self.is_prob else [state]
        return Automaton(self.alphabet, self.priority, self.transitions, init, self.kind, self.name)

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return (self.kind == other.kind and self.name == other.name
                and self.alphabet == other.alphabet
                and list(self.priority.items()) == list(other.priority.items())
                and self.transitions == other.transitions
                and self.initial == other.initial)

    def __repr__(self):
        return (f"Automaton({self.name!r}, kind={self.kind}, states={len(self.states)}, "
                f"symbols={len(self.alphabet)})")


def compress_priorities(priority: Mapping[str, int]) -> dict[str, int]:
    """Map priorities onto ``1..n`` keeping parity and relative order.

    Each distinct value goes to the least number above the previous image
    with the same parity, so ``{3, 4}`` becomes ``{1, 2}`` and ``{2}``
    stays ``{2}`` (with an empty class 1).
    """
    image, last = {}, 0
    for p in sorted(set(priority.values())):
        q = last + 1
        if q % 2 != p % 2:
            q += 1
        image[p] = last = q
    return {x: image[p] for x, p in priority.items()}


def validate(a: Automaton) -> list[Violation]:
    """Every broken invariant of ``a``; an empty list means valid."""
    out = []
    for x, p in a.priority.items():
        if not isinstance(p, int) or p < 1:
            out.append(Violation("priority-below-one", x, str(p)))
    for x in a._stray:
        out.append(Violation("unknown-state", f"transition source {x}"))
    for x, ts in a.transitions.items():
        seen = set()
        for t in ts:
            where = f"{x} --{t}"
            if t.symbol not in a.alphabet:
                out.append(Violation("unknown-symbol", where, t.symbol))
            elif len(t.targets) != a.alphabet[t.symbol]:
                out.append(Violation("arity-mismatch", where,
                                     f"{len(t.targets)} targets, arity {a.alphabet[t.symbol]}"))
            for y in t.targets:
                if y not in a.priority:
                    out.append(Violation("unknown-state", where, y))
            key = (t.symbol, t.targets)
            if key in seen:
                out.append(Violation("duplicate-transition", where))
            seen.add(key)
            if a.is_prob:
                if t.prob is None or t.prob < 0:
                    out.append(Violation("bad-probability", where, str(t.prob)))
        if a.is_prob and all(t.prob is not None for t in ts):
            m = sum(t.prob for t in ts)
            if m > 1 + MASS_SLACK:
                out.append(Violation("mass-exceeds-one", x, f"{m:.12g}"))
    for x, p in a.initial.items():
        if x not in a.priority:
            out.append(Violation("unknown-state", "init", x))
        if p < 0:
            out.append(Violation("bad-probability", f"init {x}", str(p)))
    if a.is_prob and sum(a.initial.values()) > 1 + MASS_SLACK:
        out.append(Violation("mass-exceeds-one", "init", f"{sum(a.initial.values()):.12g}"))
    return out


def validate_run(run, a: Automaton) -> list[Violation]:
    """Check a :class:`RunGraph` or :class:`PartialRun` against ``a``.

    For nondet automata each node's ``(symbol, child states)`` must be a
    transition of its state.  For prob automata any transition is allowed
    (impossible ones simply get probability 0).
    """
    out = []

    def check(where, sym, state, child_states):
        if state not in a.priority:
            out.append(Violation("unknown-state", where, state))
            return
        if sym == STAR:
            return
        if sym not in a.alphabet:
            out.append(Violation("unknown-symbol", where, sym))
            return
        if len(child_states) != a.alphabet[sym]:
            out.append(Violation("arity-mismatch", where, sym))
            return
        if not a.is_prob and not any(t.symbol == sym and t.targets == child_states
                                     for t in a.transitions[state]):
            out.append(Violation("not-a-transition", where,
                                 f"{sym}({','.join(child_states)}) from {state}"))

    if isinstance(run, RunGraph):
        for k, (sym, st, ch) in run.nodes.items():
            check(f"node {k}", sym, st, tuple(run.nodes[c][1] for c in ch))
    elif isinstance(run, PartialRun):
        def walk(r, path):
            check(f"position {'.'.join(path) or 'root'}", r.symbol, r.state,
                  tuple(c.state for c in r.children))
            for i, c in enumerate(r.children):
                walk(c, path + (str(i),))
        walk(run, ())
    else:
        raise TypeError(f"not a run: {type(run).__name__}")
    return out
