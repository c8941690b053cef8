"""Independent checks for the fixed-point answers.

* :func:`bscc_accprob` -- classical Markov-chain analysis for word automata.
* :func:`positional_member` -- exhaustive search over positional runs.
* :func:`monte_carlo_cylinder` -- seeded sampling of prefix probabilities.

None of these use the equational-system solver.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .model import NONDET, PROB, STAR, Automaton, PartialTree, RegularTree, RunGraph
from .model import universal_parity_check

SINK = ("<sink>",)
DONE = ("<done>",)

MAX_PRODUCT_NODES = 20
MAX_CHOICES = 4
MAX_DIRECT_SOLVE = 50
ROUNDING = 1e-12


class BudgetExceeded(ValueError):
    """The instance is too large for exhaustive checking."""


@dataclass
class BsccReport:
    bsccs: list          # each a tuple of chain nodes (states, SINK or DONE)
    accepting: list      # parallel to bsccs
    accept: dict         # state -> probability of ending in an accepting BSCC
    reject: dict         # state -> probability of ending in a rejecting BSCC
    method: str = ""


def _chain(a):
    """Transition matrix over states + divergence sink + finite-word terminal."""
    if a.kind != PROB:
        raise ValueError(f"expected a prob automaton, got kind {a.kind!r}")
    for s, k in a.alphabet.items():
        if k > 1:
            raise ValueError(f"word automata only: symbol {s!r} has arity {k}")
    nodes = list(a.states) + [SINK, DONE]
    index = {v: i for i, v in enumerate(nodes)}
    P = np.zeros((len(nodes), len(nodes)))
    for x in a.states:
        i = index[x]
        for t in a.transitions[x]:
            j = index[t.targets[0]] if t.targets else index[DONE]
            P[i, j] += t.prob
        missing = 1.0 - sum(t.prob for t in a.transitions[x])
        # rounding residue of decimal literals is not divergence
        if missing > ROUNDING:
            P[i, index[SINK]] += missing
    P[index[SINK], index[SINK]] = 1.0
    P[index[DONE], index[DONE]] = 1.0
    return nodes, index, P


def _absorption(P, targets, rest):
    """Probability of eventually hitting ``targets`` from each node in ``rest``."""
    if not rest:
        return {}, "none"
    Q = P[np.ix_(rest, rest)]
    b = P[np.ix_(rest, targets)].sum(axis=1) if targets else np.zeros(len(rest))
    if len(rest) <= MAX_DIRECT_SOLVE:
        x = np.linalg.solve(np.eye(len(rest)) - Q, b)
        method = "direct"
    else:
        x = np.zeros(len(rest))
        for _ in range(10**7):
            y = Q @ x + b
            if np.max(np.abs(y - x)) < 1e-12:
                x = y
                break
            x = y
        method = "value-iteration"
    return dict(zip(rest, np.clip(x, 0.0, 1.0))), method


def bscc_report(a: Automaton) -> BsccReport:
    """Bottom SCC analysis of a word PPTA (every symbol of arity <= 1).

    Missing transition mass goes to a rejecting sink; nullary emissions end
    the word and go to an accepting terminal.  A BSCC made of automaton
    states accepts iff its largest priority is even.
    """
    nodes, index, P = _chain(a)
    g = nx.DiGraph()
    g.add_nodes_from(range(len(nodes)))
    g.add_edges_from(zip(*np.nonzero(P > 0)))
    bsccs, accepting = [], []
    for comp in nx.strongly_connected_components(g):
        if any(w not in comp for v in comp for w in g.successors(v)):
            continue
        members = tuple(nodes[i] for i in sorted(comp))
        if DONE in members:
            ok = True
        elif SINK in members:
            ok = False
        else:
            ok = max(a.priority[x] for x in members) % 2 == 0
        bsccs.append(members)
        accepting.append(ok)

    def hit(want):
        targets = sorted(index[v] for m, ok in zip(bsccs, accepting) if ok == want for v in m)
        back = set(targets)
        for t in targets:
            back |= nx.ancestors(g, t)
        rest = sorted(back - set(targets))
        vals, method = _absorption(P, targets, rest)
        out = {}
        for x in a.states:
            i = index[x]
            out[x] = 1.0 if i in targets else float(vals.get(i, 0.0))
        return out, method

    acc, method = hit(True)
    rej, _ = hit(False)
    order = sorted(range(len(bsccs)), key=lambda k: [str(v) for v in bsccs[k]])
    return BsccReport([bsccs[k] for k in order], [accepting[k] for k in order], acc, rej, method)


def bscc_accprob(a: Automaton) -> dict:
    """Acceptance probability per state of a word PPTA, via bottom SCCs."""
    return bscc_report(a).accept


# ---------------------------------------------------------------------------
# positional runs


def positional_member(a: Automaton, t: RegularTree) -> bool:
    """Exhaustively search positional runs of ``a`` over the unfolding of ``t``.

    A positional run picks one transition per reachable ``(node, state)``
    pair; the resulting run graph must pass the parity check.  Parity
    acceptance is positionally determined, so this is complete.  Raises
    :class:`BudgetExceeded` instead of truncating the search.
    """
    if a.kind != NONDET:
        raise ValueError(f"expected a nondet automaton, got kind {a.kind!r}")
    tree_nodes = t.reachable()
    if any(t.nodes[v][0] == STAR for v in tree_nodes):
        raise ValueError("membership needs a total tree (no '*' leaves)")
    if len(tree_nodes) * len(a.states) > MAX_PRODUCT_NODES:
        raise BudgetExceeded(
            f"{len(tree_nodes)} tree nodes x {len(a.states)} states exceeds {MAX_PRODUCT_NODES}")
    options = {}
    for v in tree_nodes:
        sym, kids = t.nodes[v]
        if sym not in a.alphabet or len(kids) != a.alphabet[sym]:
            raise ValueError(f"tree node {v!r} does not match the alphabet")
        for x in a.states:
            opts = [tuple(zip(kids, tr.targets)) for tr in a.transitions[x] if tr.symbol == sym]
            if len(opts) > MAX_CHOICES:
                raise BudgetExceeded(f"{len(opts)} choices at ({v}, {x}) exceeds {MAX_CHOICES}")
            options[v, x] = opts

    def accepted(choice, root):
        # edges to still-unassigned pairs are dropped; a bad cycle among the
        # assigned pairs survives every completion, so this also prunes
        name = {p: f"{p[0]}|{p[1]}" for p in choice}
        run = RunGraph({name[p]: (t.nodes[p[0]][0], p[1], [name[q] for q in succ if q in name])
                        for p, succ in choice.items()}, name[root])
        return universal_parity_check(run, a.priority)

    def search(choice, pending, root):
        if choice and not accepted(choice, root):
            return False
        if not pending:
            return True
        p, rest = pending[0], pending[1:]
        for succ in options[p]:
            nxt = dict(choice)
            nxt[p] = succ
            new = [q for q in dict.fromkeys(succ) if q not in nxt and q not in rest]
            if search(nxt, rest + new, root):
                return True
        return False

    return any(search({}, [(t.root, x)], (t.root, x)) for x in sorted(a.initial_states))


def positional_nonempty(a: Automaton) -> bool:
    """Some positional choice of one transition per state makes every reachable cycle even.

    Exhaustive over all choice functions; intended for automata with a
    handful of states.
    """
    if a.kind != NONDET:
        raise ValueError(f"expected a nondet automaton, got kind {a.kind!r}")

    def search(choice, pending, root):
        if choice:
            run = RunGraph({x: ("_", x, [y for y in succ if y in choice])
                            for x, succ in choice.items()}, root)
            if not universal_parity_check(run, a.priority):
                return False
        if not pending:
            return True
        x, rest = pending[0], pending[1:]
        for tr in a.transitions[x]:
            nxt = dict(choice)
            nxt[x] = tr.targets
            new = [y for y in dict.fromkeys(tr.targets) if y not in nxt and y not in rest]
            if search(nxt, rest + new, root):
                return True
        return False

    return any(search({}, [x], x) for x in sorted(a.initial_states))


def cycle_parity_check(run: RunGraph, priority) -> bool:
    """Brute-force twin of ``universal_parity_check``: enumerate every simple cycle."""
    g = run.digraph()
    return all(max(priority[run.nodes[v][1]] for v in cyc) % 2 == 0
               for cyc in nx.simple_cycles(g))


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloEstimate:
    estimate: float
    stderr: float
    hits: int
    samples: int
    seed: int
    depth_cap: int
    note: str = ("estimates the prefix-generation probability (no-divergence at '*' "
                 "leaves up to the depth cap); parity acceptance is not sampled")

    def within(self, target, k=3.0, slack=0.0) -> bool:
        """``|estimate - target| <= k * stderr + slack``.

        ``slack`` absorbs the truncation error of a target computed by a
        tolerance-stopped fixed point; with zero hits the standard error is 0.
        """
        return abs(self.estimate - target) <= k * self.stderr + slack


def monte_carlo_cylinder(a: Automaton, tree: PartialTree, samples: int = 10**5,
                         seed: int = 0, depth_cap: int = 30) -> MonteCarloEstimate:
    """Sample runs of ``a`` and count those whose symbols match ``tree``.

    A sample matches when its generated prefix agrees with ``tree`` and,
    below each ``*`` leaf, the generation does not diverge before absolute
    depth ``depth_cap``.  The bias from the finite cap is upward and is
    bounded by the k-step no-divergence gap.  Sampling below ``*`` leaves
    costs time exponential in the cap for branching symbols.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if a.kind != PROB:
        raise ValueError(f"expected a prob automaton, got kind {a.kind!r}")
    rng = random.Random(seed)
    trans = {x: a.transitions[x] for x in a.states}

    def step(x):
        u = rng.random()
        acc = 0.0
        for t in trans[x]:
            acc += t.prob
            if u < acc:
                return t
        return None

    def survives(x, d):
        if d >= depth_cap:
            return True
        t = step(x)
        return t is not None and all(survives(y, d + 1) for y in t.targets)

    def matches(node, x, d):
        if node.symbol == STAR:
            return survives(x, d)
        t = step(x)
        if t is None or t.symbol != node.symbol:
            return False
        return all(matches(c, y, d + 1) for c, y in zip(node.children, t.targets))

    init = list(a.initial.items())
    hits = 0
    for _ in range(samples):
        u = rng.random()
        acc, root = 0.0, None
        for x, p in init:
            acc += p
            if u < acc:
                root = x
                break
        if root is not None and matches(tree, root, 0):
            hits += 1
    est = hits / samples
    return MonteCarloEstimate(est, math.sqrt(est * (1 - est) / samples), hits, samples, seed,
                              depth_cap)
