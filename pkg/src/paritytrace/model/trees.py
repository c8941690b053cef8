"""Ranked alphabets, regular trees, runs and their finite prefixes."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping

import networkx as nx

STAR = "*"


class RankedAlphabet(Mapping):
    """Finite set of symbols, each with an arity.  Iteration order is declaration order."""

    def __init__(self, arities):
        items = list(arities.items()) if isinstance(arities, Mapping) else list(arities)
        names = [s for s, _ in items]
        if not items:
            raise ValueError("a ranked alphabet needs at least one symbol")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbols in {names}")
        for s, k in items:
            if s == STAR:
                raise ValueError(f"{STAR!r} is reserved for continuation leaves")
            if not isinstance(k, int) or k < 0:
                raise ValueError(f"arity of {s!r} must be a non-negative integer")
        self._arity = dict(items)

    def __getitem__(self, symbol):
        return self._arity[symbol]

    def __iter__(self):
        return iter(self._arity)

    def __len__(self):
        return len(self._arity)

    def __eq__(self, other):
        if not isinstance(other, RankedAlphabet):
            return NotImplemented
        return list(self._arity.items()) == list(other._arity.items())

    def __hash__(self):
        return hash(tuple(self._arity.items()))

    def __repr__(self):
        return f"RankedAlphabet({self._arity!r})"

    @property
    def max_arity(self):
        return max(self._arity.values())


# ---------------------------------------------------------------------------
# finite prefixes (partial trees / partial runs)


@dataclass(frozen=True)
class PartialTree:
    """A finite ordered tree; leaves labelled ``*`` stand for any continuation."""

    symbol: str
    children: tuple["PartialTree", ...] = ()

    def __str__(self):
        if not self.children:
            return self.symbol
        return f"{self.symbol}({','.join(map(str, self.children))})"

    @classmethod
    def parse(cls, text: str) -> "PartialTree":
        """Read the term syntax produced by ``str``, e.g. ``hd(tl(*))``."""
        return _TermReader(text, run=False).read()

    def is_proper(self, alphabet: RankedAlphabet) -> bool:
        if self.symbol == STAR:
            return not self.children
        return (self.symbol in alphabet
                and len(self.children) == alphabet[self.symbol]
                and all(c.is_proper(alphabet) for c in self.children))

    def depth(self) -> int:
        if self.symbol == STAR:
            return 0
        return 1 + max((c.depth() for c in self.children), default=0)

    def star_count(self) -> int:
        if self.symbol == STAR:
            return 1
        return sum(c.star_count() for c in self.children)

    def extends(self, other: "PartialTree") -> bool:
        """True if ``self`` is obtained from ``other`` by expanding ``*`` leaves."""
        if other.symbol == STAR:
            return True
        return (self.symbol == other.symbol
                and len(self.children) == len(other.children)
                and all(a.extends(b) for a, b in zip(self.children, other.children)))


@dataclass(frozen=True)
class PartialRun:
    """A finite run prefix: every node carries a symbol (possibly ``*``) and a state."""

    symbol: str
    state: str
    children: tuple["PartialRun", ...] = ()

    def __str__(self):
        head = f"{self.symbol}@{self.state}"
        if not self.children:
            return head
        return f"{head}({','.join(map(str, self.children))})"

    @classmethod
    def parse(cls, text: str) -> "PartialRun":
        """Read the term syntax produced by ``str``, e.g. ``hd@x(*@x)``."""
        return _TermReader(text, run=True).read()

    def is_proper(self, alphabet: RankedAlphabet) -> bool:
        return delst(self).is_proper(alphabet)

    def leaves(self) -> Iterator["PartialRun"]:
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()


class _TermReader:
    _token = re.compile(r"\s*([(),]|[^\s(),]+)")

    def __init__(self, text, run):
        self.tokens = self._token.findall(text)
        if "".join(self.tokens) != re.sub(r"\s+", "", text):
            raise ValueError(f"cannot tokenise term {text!r}")
        self.pos = 0
        self.run = run

    def read(self):
        node = self._node()
        if self.pos != len(self.tokens):
            raise ValueError(f"trailing input after position {self.pos}: {self.tokens[self.pos:]}")
        return node

    def _next(self):
        if self.pos >= len(self.tokens):
            raise ValueError("unexpected end of term")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _node(self):
        label = self._next()
        if label in "(),":
            raise ValueError(f"expected a symbol, got {label!r}")
        children = []
        if self.pos < len(self.tokens) and self.tokens[self.pos] == "(":
            self.pos += 1
            if self.tokens[self.pos:self.pos + 1] == [")"]:
                self.pos += 1
            else:
                while True:
                    children.append(self._node())
                    sep = self._next()
                    if sep == ")":
                        break
                    if sep != ",":
                        raise ValueError(f"expected ',' or ')', got {sep!r}")
        if self.run:
            symbol, _, state = label.partition("@")
            if not state:
                raise ValueError(f"run node {label!r} lacks '@state'")
            return PartialRun(symbol, state, tuple(children))
        return PartialTree(label, tuple(children))


# ---------------------------------------------------------------------------
# regular trees and runs


class RegularTree:
    """A finite node graph whose unfolding from ``root`` is a (possibly infinite) tree.

    ``nodes`` maps an opaque id to ``(symbol, children)``.  Unary-only
    graphs are lasso words.  ``*`` leaves make the graph a partial tree.
    """

    def __init__(self, nodes, root, name=""):
        self.nodes = {str(k): (sym, tuple(ch)) for k, (sym, ch) in nodes.items()}
        self.root = root
        self.name = name
        if root not in self.nodes:
            raise ValueError(f"root {root!r} is not a node")
        for k, (sym, ch) in self.nodes.items():
            for c in ch:
                if c not in self.nodes:
                    raise ValueError(f"node {k!r} refers to unknown node {c!r}")
            if sym == STAR and ch:
                raise ValueError(f"node {k!r}: '*' leaves cannot have children")

    def __eq__(self, other):
        return (isinstance(other, RegularTree) and self.root == other.root
                and self.nodes == other.nodes)

    def __repr__(self):
        return f"RegularTree({self.nodes!r}, root={self.root!r})"

    def symbol(self, node):
        return self.nodes[node][0]

    def children(self, node):
        return self.nodes[node][1]

    def reachable(self):
        seen, todo = {self.root}, [self.root]
        while todo:
            for c in self.nodes[todo.pop()][1]:
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        return seen

    def violations(self, alphabet: RankedAlphabet):
        out = []
        for k, (sym, ch) in self.nodes.items():
            if sym == STAR:
                continue
            if sym not in alphabet:
                out.append(f"unknown-symbol at node {k}: {sym}")
            elif len(ch) != alphabet[sym]:
                out.append(f"arity-mismatch at node {k}: {sym} has {len(ch)} children, arity {alphabet[sym]}")
        return out

    def to_partial(self) -> PartialTree:
        """The finite tree below ``root``; fails on cycles."""
        return _graph_to_term(self.root, self.nodes, lambda sym, ch: PartialTree(sym, ch))


class RunGraph:
    """Like :class:`RegularTree`, but nodes carry ``(symbol, state, children)``."""

    def __init__(self, nodes, root, name=""):
        self.nodes = {str(k): (sym, st, tuple(ch)) for k, (sym, st, ch) in nodes.items()}
        self.root = root
        self.name = name
        if root not in self.nodes:
            raise ValueError(f"root {root!r} is not a node")
        for k, (sym, _, ch) in self.nodes.items():
            for c in ch:
                if c not in self.nodes:
                    raise ValueError(f"node {k!r} refers to unknown node {c!r}")
            if sym == STAR and ch:
                raise ValueError(f"node {k!r}: '*' leaves cannot have children")

    def __eq__(self, other):
        return (isinstance(other, RunGraph) and self.root == other.root
                and self.nodes == other.nodes)

    def __repr__(self):
        return f"RunGraph({self.nodes!r}, root={self.root!r})"

    @property
    def is_partial(self):
        return any(sym == STAR for sym, _, _ in self.nodes.values())

    def to_partial(self) -> PartialRun:
        return _graph_to_term(self.root, {k: ((s, x), ch) for k, (s, x, ch) in self.nodes.items()},
                              lambda lab, ch: PartialRun(lab[0], lab[1], ch))

    def digraph(self) -> nx.DiGraph:
        """Edges of the part reachable from the root (parallel edges collapsed)."""
        g = nx.DiGraph()
        g.add_node(self.root)
        todo, seen = [self.root], {self.root}
        while todo:
            k = todo.pop()
            for c in self.nodes[k][2]:
                g.add_edge(k, c)
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        return g


def _graph_to_term(root, nodes, make):
    on_path = set()

    def build(k):
        if k in on_path:
            raise ValueError(f"node {k!r} lies on a cycle; not a finite tree")
        on_path.add(k)
        label, ch = nodes[k]
        term = make(label, tuple(build(c) for c in ch))
        on_path.discard(k)
        return term

    return build(root)


def unfold(t: RegularTree, depth: int) -> PartialTree:
    """Truncate the unfolding of ``t`` at ``depth``, placing ``*`` at the cut."""
    if depth < 0:
        raise ValueError("depth must be non-negative")

    def go(node, d):
        if d == 0:
            return PartialTree(STAR)
        sym, ch = t.nodes[node]
        return PartialTree(sym, tuple(go(c, d - 1) for c in ch))

    return go(t.root, depth)


def delst(r):
    """Forget the states of a run graph or partial run."""
    if isinstance(r, PartialRun):
        return PartialTree(r.symbol, tuple(delst(c) for c in r.children))
    if isinstance(r, RunGraph):
        return RegularTree({k: (s, ch) for k, (s, _, ch) in r.nodes.items()}, r.root, r.name)
    raise TypeError(f"cannot remove states from {type(r).__name__}")


def universal_parity_check(run: RunGraph, priority: Mapping[str, int]) -> bool:
    """Does every infinite branch of the unfolding of ``run`` satisfy the parity condition?

    Equivalent to: every cycle reachable from the root has an even maximum
    priority.  Decided by repeatedly splitting into strongly connected
    components and deleting the top even-priority states of each component.
    """
    if run.is_partial:
        raise ValueError("parity check needs a total run (no '*' leaves)")
    g = run.digraph()
    prio = {k: priority[run.nodes[k][1]] for k in g}
    pending = [set(g)]
    while pending:
        sub = g.subgraph(pending.pop())
        for comp in nx.strongly_connected_components(sub):
            if len(comp) == 1:
                v = next(iter(comp))
                if not sub.has_edge(v, v):
                    continue
            top = max(prio[v] for v in comp)
            if top % 2:
                return False
            rest = {v for v in comp if prio[v] != top}
            if rest:
                pending.append(rest)
    return True


def complete_partition(alphabet: RankedAlphabet, depth: int) -> list[PartialTree]:
    """All proper partial trees whose ``*`` leaves sit exactly at ``depth``.

    Their cylinder sets partition the set of all trees.
    """
    if depth == 0:
        return [PartialTree(STAR)]
    below = complete_partition(alphabet, depth - 1)
    out = []
    for sym, k in alphabet.items():
        out.extend(PartialTree(sym, kids) for kids in itertools.product(below, repeat=k))
    return out
