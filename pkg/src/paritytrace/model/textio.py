"""Line-based text formats for automata, trees and runs.

Automaton file::

    automaton coin
    kind prob
    symbol hd 1
    symbol tl 1
    state x 2
    init x 1.0
    trans x hd ( x ) 0.5
    trans x tl ( x ) 0.5

Tree / run file::

    tree ab
    node n0 a ( n1 )
    node n1 b ( n0 )
    root n0

Runs write ``symbol@state``; ``*`` may label childless nodes.  ``#`` starts
a comment.  Tokens are separated by whitespace, parentheses and commas.
"""
from __future__ import annotations

import re

from .automaton import NONDET, PROB, Automaton, Transition
from .trees import STAR, RankedAlphabet, RegularTree, RunGraph


class ParseError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_TOKEN = re.compile(r"[(),]|[^\s(),]+")


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _TOKEN.findall(line)
        if toks:
            yield lineno, toks


def _args(lineno, toks):
    """Split ``( a , b , c ) rest`` into ``[a, b, c]`` and ``rest``."""
    if not toks or toks[0] != "(":
        raise ParseError(lineno, "expected '('")
    try:
        close = toks.index(")")
    except ValueError:
        raise ParseError(lineno, "missing ')'") from None
    inner = toks[1:close]
    items = inner[0::2]
    if inner and (any(t != "," for t in inner[1::2]) or len(inner) % 2 == 0
                  or any(t in "()," for t in items)):
        raise ParseError(lineno, f"malformed argument list {' '.join(toks[:close + 1])}")
    return items, toks[close + 1:]


def _prob(lineno, tok):
    try:
        p = float(tok)
    except ValueError:
        raise ParseError(lineno, f"not a probability: {tok!r}") from None
    if not 0.0 <= p <= 1.0:
        raise ParseError(lineno, f"probability {tok} outside [0, 1]")
    return p


def parse_automaton(text: str) -> Automaton:
    """Parse an automaton file; raises :class:`ParseError` with the offending line."""
    name = None
    kind = None
    symbols: dict[str, int] = {}
    states: dict[str, int] = {}
    initial: dict[str, float] = {}
    transitions: dict[str, list[Transition]] = {}
    seen_trans = set()

    def need_kind(lineno):
        if kind is None:
            raise ParseError(lineno, "'kind' must be declared before init/trans")

    def need_state(lineno, x):
        if x not in states:
            raise ParseError(lineno, f"unknown state {x!r}")

    for lineno, toks in _lines(text):
        head, rest = toks[0], toks[1:]
        if head == "automaton":
            if len(rest) != 1:
                raise ParseError(lineno, "usage: automaton <name>")
            if name is not None:
                raise ParseError(lineno, "duplicate 'automaton' line")
            name = rest[0]
        elif head == "kind":
            if len(rest) != 1 or rest[0] not in (NONDET, PROB):
                raise ParseError(lineno, "usage: kind nondet|prob")
            if kind is not None:
                raise ParseError(lineno, "duplicate 'kind' line")
            kind = rest[0]
        elif head == "symbol":
            if len(rest) != 2:
                raise ParseError(lineno, "usage: symbol <name> <arity>")
            sym, ar = rest
            if sym == STAR:
                raise ParseError(lineno, "'*' is reserved")
            if sym in symbols:
                raise ParseError(lineno, f"duplicate symbol {sym!r}")
            if not ar.isdigit():
                raise ParseError(lineno, f"arity must be a non-negative integer, got {ar!r}")
            symbols[sym] = int(ar)
        elif head == "state":
            if len(rest) != 2:
                raise ParseError(lineno, "usage: state <name> <priority>")
            x, pr = rest
            if x in states:
                raise ParseError(lineno, f"duplicate state {x!r}")
            if not pr.isdigit() or int(pr) < 1:
                raise ParseError(lineno, f"priority must be a positive integer, got {pr!r}")
            states[x] = int(pr)
        elif head == "init":
            need_kind(lineno)
            want = 2 if kind == PROB else 1
            if len(rest) != want:
                raise ParseError(lineno, "usage: init <state>" + (" <prob>" if kind == PROB else ""))
            need_state(lineno, rest[0])
            if rest[0] in initial:
                raise ParseError(lineno, f"duplicate init for {rest[0]!r}")
            initial[rest[0]] = _prob(lineno, rest[1]) if kind == PROB else 1.0
        elif head == "trans":
            need_kind(lineno)
            if len(rest) < 3:
                raise ParseError(lineno, "usage: trans <src> <symbol> ( <state>, ... ) [<prob>]")
            src, sym = rest[0], rest[1]
            need_state(lineno, src)
            if sym not in symbols:
                raise ParseError(lineno, f"unknown symbol {sym!r}")
            targets, tail = _args(lineno, rest[2:])
            for y in targets:
                need_state(lineno, y)
            if len(targets) != symbols[sym]:
                raise ParseError(lineno, f"arity mismatch: {sym} has arity {symbols[sym]}, "
                                         f"got {len(targets)} targets")
            if len(tail) != (1 if kind == PROB else 0):
                raise ParseError(lineno, "prob automata need exactly one probability per "
                                         "transition; nondet automata none")
            key = (src, sym, tuple(targets))
            if key in seen_trans:
                raise ParseError(lineno, f"duplicate transition {sym}({','.join(targets)}) from {src}")
            seen_trans.add(key)
            p = _prob(lineno, tail[0]) if kind == PROB else None
            transitions.setdefault(src, []).append(Transition(sym, tuple(targets), p))
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")

    if kind is None:
        raise ParseError(0, "missing 'kind' line")
    if not symbols:
        raise ParseError(0, "no symbols declared")
    init = initial if kind == PROB else list(initial)
    return Automaton(RankedAlphabet(symbols), states, transitions, init, kind, name or "")


def _fmt_prob(p):
    return f"{p:.12g}"


def format_automaton(a: Automaton) -> str:
    """Inverse of :func:`parse_automaton` (fixed field order)."""
    out = []
    if a.name:
        out.append(f"automaton {a.name}")
    out.append(f"kind {a.kind}")
    out += [f"symbol {s} {k}" for s, k in a.alphabet.items()]
    out += [f"state {x} {p}" for x, p in a.priority.items()]
    for x, p in a.initial.items():
        out.append(f"init {x} {_fmt_prob(p)}" if a.is_prob else f"init {x}")
    for x in a.states:
        for t in a.transitions[x]:
            line = f"trans {x} {t.symbol} ( {' , '.join(t.targets)} )"
            out.append(f"{line} {_fmt_prob(t.prob)}" if a.is_prob else line)
    return "\n".join(out) + "\n"


def parse_tree_file(text: str):
    """Parse a tree or run file into a :class:`RegularTree` or :class:`RunGraph`."""
    header = None
    name = ""
    nodes = {}
    root = None
    for lineno, toks in _lines(text):
        head, rest = toks[0], toks[1:]
        if head in ("tree", "run"):
            if header is not None:
                raise ParseError(lineno, "duplicate header line")
            if len(rest) != 1:
                raise ParseError(lineno, f"usage: {head} <name>")
            header, name = head, rest[0]
        elif head == "node":
            if header is None:
                raise ParseError(lineno, "missing 'tree' or 'run' header")
            if len(rest) < 2:
                raise ParseError(lineno, "usage: node <id> <symbol> ( <id>, ... )")
            nid, label = rest[0], rest[1]
            if nid in nodes:
                raise ParseError(lineno, f"duplicate node {nid!r}")
            if len(rest) == 2:
                kids, tail = [], []
            else:
                kids, tail = _args(lineno, rest[2:])
            if tail:
                raise ParseError(lineno, f"unexpected tokens {tail}")
            if header == "run":
                sym, at, st = label.partition("@")
                if not at or not st or not sym:
                    raise ParseError(lineno, f"run nodes need symbol@state, got {label!r}")
            else:
                if "@" in label:
                    raise ParseError(lineno, "states are only allowed in run files")
                sym = label
            if sym == STAR and kids:
                raise ParseError(lineno, "'*' nodes cannot have children")
            nodes[nid] = (lineno, sym, st if header == "run" else None, kids)
        elif head == "root":
            if len(rest) != 1:
                raise ParseError(lineno, "usage: root <id>")
            if root is not None:
                raise ParseError(lineno, "duplicate 'root' line")
            root = (lineno, rest[0])
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")
    if header is None:
        raise ParseError(0, "missing 'tree' or 'run' header")
    if root is None:
        raise ParseError(0, "missing 'root' line")
    if root[1] not in nodes:
        raise ParseError(root[0], f"unknown root node {root[1]!r}")
    for nid, (lineno, _, _, kids) in nodes.items():
        for k in kids:
            if k not in nodes:
                raise ParseError(lineno, f"unknown child node {k!r}")
    if header == "run":
        return RunGraph({k: (s, x, ch) for k, (_, s, x, ch) in nodes.items()}, root[1], name)
    return RegularTree({k: (s, ch) for k, (_, s, _, ch) in nodes.items()}, root[1], name)


def format_tree_file(t) -> str:
    if isinstance(t, RunGraph):
        out = [f"run {t.name or 'r'}"]
        for k, (s, x, ch) in t.nodes.items():
            out.append(f"node {k} {s}@{x} ( {' , '.join(ch)} )")
    elif isinstance(t, RegularTree):
        out = [f"tree {t.name or 't'}"]
        for k, (s, ch) in t.nodes.items():
            out.append(f"node {k} {s} ( {' , '.join(ch)} )")
    else:
        raise TypeError(f"cannot format {type(t).__name__}")
    out.append(f"root {t.root}")
    return "\n".join(out) + "\n"
