"""Probabilistic parity tree automata: divergence, acceptance and cylinder measures.

Everything is built on the one-step operator ``psi`` on ``[0, 1]^X``::

    psi(p)(x) = sum over (sym, (x_1..x_k)) of delta(x)(sym, (x_1..x_k)) * p(x_1) * ... * p(x_k)

Its greatest fixed point is the probability of never diverging; the
priority-indexed mu/nu system built from its restrictions to the classes
``X_i`` gives the probability of generating an accepting run.
"""
from __future__ import annotations

import itertools
import threading
from collections.abc import Mapping

import networkx as nx

from .fixpoint import (DEFAULT_POLICY, MU, NU, Equation, EquationalSystem, IntervalVector,
                       NotConverged, SolverPolicy, gfp, kleene_chain, lfp, solve)
from .model import PROB, STAR, Automaton, PartialRun, PartialTree


class ProbVector(Mapping):
    """State-indexed values in ``[0, 1]`` plus a convergence report."""

    def __init__(self, states, values, converged=True, iterations=0, residual=0.0):
        self.states = tuple(states)
        self.values = tuple(values)
        self.converged = converged
        self.iterations = iterations
        self.residual = residual
        self._index = {x: i for i, x in enumerate(self.states)}

    def __getitem__(self, x):
        return self.values[self._index[x]]

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        body = ", ".join(f"{x}: {v:.12g}" for x, v in zip(self.states, self.values))
        flag = "" if self.converged else ", UNCONVERGED"
        return f"ProbVector({{{body}}}{flag})"

    def sup_distance(self, other) -> float:
        return max((abs(self[x] - other[x]) for x in self.states), default=0.0)


class PsiOperator:
    """The monotone map ``psi`` of a PPTA, on float tuples ordered like ``order``.

    ``order`` defaults to ``a.states``; any permutation of it may be given.
    """

    def __init__(self, a: Automaton, order=None):
        _check_kind(a)
        self.states = a.states if order is None else tuple(order)
        if sorted(self.states) != sorted(a.states):
            raise ValueError("order must be a permutation of the states")
        index = {x: i for i, x in enumerate(self.states)}
        self.rows = [
            tuple((t.prob, tuple(index[y] for y in t.targets)) for t in a.transitions[x])
            for x in self.states
        ]
        self.lattice = IntervalVector(self.states)

    def __call__(self, p, rows=None):
        """``psi(p)``, or only the coordinates listed in ``rows``."""
        out = []
        for i in (range(len(self.rows)) if rows is None else rows):
            acc = 0.0
            for prob, kids in self.rows[i]:
                term = prob
                for j in kids:
                    term *= p[j]
                acc += term
            out.append(acc)
        return tuple(out)

    def sweep_order(self, rows):
        """``rows`` rearranged so that, along dependencies inside ``rows``,
        a coordinate tends to come after the ones it reads."""
        rows = list(rows)
        mine = set(rows)
        g = nx.DiGraph()
        g.add_nodes_from(rows)
        g.add_edges_from((i, j) for i in rows for _, kids in self.rows[i] for j in kids
                         if j in mine and j != i)
        seen, order = set(), []
        for r in rows:
            if r not in seen:
                part = [v for v in nx.dfs_postorder_nodes(g, r) if v not in seen]
                seen.update(part)
                order.extend(part)
        return order

    def sweep(self, p, order, rows):
        """One Gauss-Seidel pass: update ``p`` in place at the coordinates of
        ``order``, each using the values already updated in this pass, and
        return the new values at ``rows``."""
        for i in order:
            acc = 0.0
            for prob, kids in self.rows[i]:
                term = prob
                for j in kids:
                    term *= p[j]
                acc += term
            p[i] = acc
        return tuple([p[i] for i in rows])


def _check_kind(a):
    if a.kind != PROB:
        raise ValueError(f"expected a prob automaton, got kind {a.kind!r}")


_lock = threading.Lock()


def _memo(a, key, compute):
    with _lock:
        cache = a.__dict__.setdefault("_prob_cache", {})
        if key in cache:
            return cache[key]
    value = compute()
    with _lock:
        cache[key] = value
    return value


def nodiv_chain(a: Automaton):
    """The descending iterates ``1, psi(1), psi(psi(1)), ...`` (the k-step no-divergence vectors)."""
    psi = PsiOperator(a)
    return kleene_chain(psi, psi.lattice, NU)


def nodiv(a: Automaton, policy: SolverPolicy = DEFAULT_POLICY) -> ProbVector:
    """Probability, per state, of never diverging: the greatest fixed point of ``psi``."""
    def compute():
        psi = PsiOperator(a)
        res = gfp(psi, psi.lattice, policy)
        return ProbVector(a.states, res.value, res.converged, res.iterations, res.residual)
    return _memo(a, ("nodiv", policy), compute)


def termination(a: Automaton, policy: SolverPolicy = DEFAULT_POLICY) -> ProbVector:
    """Least fixed point of ``psi``: probability of generating a finite tree."""
    psi = PsiOperator(a)
    res = lfp(psi, psi.lattice, policy)
    return ProbVector(a.states, res.value, res.converged, res.iterations, res.residual)


def accprob_system(a: Automaton, gauss_seidel: bool = True) -> EquationalSystem:
    """``u_i =_{eta_i} psi([u_1..u_n]) restricted to X_i``, mu for odd ``i``, nu for even.

    With ``gauss_seidel`` each equation updates its class one state at a
    time, reading the values already updated in the same pass.  That map
    is monotone and has exactly the fixed points of the plain restriction
    (a point is fixed by the pass iff every single update fixes it), so
    every interim least/greatest fixed point and hence the solution is
    unchanged; chains through several states of a class just need fewer
    passes.
    """
    classes = a.priority_classes()
    # states listed class by class, so the concatenated parts are psi's argument
    psi = PsiOperator(a, [x for cls in classes for x in cls])
    offsets = list(itertools.accumulate((len(c) for c in classes), initial=0))

    def make(i):
        mine = range(offsets[i], offsets[i + 1])
        if gauss_seidel:
            order = psi.sweep_order(mine)

            def f(parts):
                return psi.sweep(list(itertools.chain.from_iterable(parts)), order, mine)
        else:
            def f(parts):
                return psi(list(itertools.chain.from_iterable(parts)), mine)
        return f

    return EquationalSystem(
        [Equation(f"u{i + 1}", MU if i % 2 == 0 else NU, IntervalVector(cls), make(i))
         for i, cls in enumerate(classes)])


def accprob(a: Automaton, policy: SolverPolicy = DEFAULT_POLICY) -> ProbVector:
    """Probability, per state, of generating an accepting run."""
    _check_kind(a)

    def compute():
        sol = solve(accprob_system(a), policy)
        value = {}
        for cls, part in zip(a.priority_classes(), sol.values):
            value.update(zip(cls, part))
        iters = sum(d.iterations for d in sol.diagnostics)
        resid = max((d.max_residual for d in sol.diagnostics), default=0.0)
        vec = ProbVector(a.states, [value[x] for x in a.states], sol.converged, iters, resid)
        vec.solution = sol
        return vec
    return _memo(a, ("accprob", policy), compute)


def _initial(a, start):
    if start is None:
        return a.initial
    if start not in a.priority:
        raise KeyError(f"unknown state {start!r}")
    return {start: 1.0}


def _raise_if(vec, value, what):
    if not vec.converged:
        raise NotConverged(f"{what}: underlying fixed point did not converge", last=value)
    return value


def run_cylinder_prob(a: Automaton, run: PartialRun, policy: SolverPolicy = DEFAULT_POLICY,
                      start=None) -> float:
    """Probability of the set of runs extending the partial run ``run``.

    ``start`` replaces the initial distribution by the Dirac distribution at that state.
    """
    _check_kind(a)
    table = {(x, t.symbol, t.targets): t.prob for x in a.states for t in a.transitions[x]}
    nd = nodiv(a, policy)

    def weight(r):
        if r.state not in a.priority:
            raise KeyError(f"unknown state {r.state!r}")
        if r.symbol == STAR:
            if r.children:
                raise ValueError("'*' nodes cannot have children")
            return nd[r.state]
        if r.symbol not in a.alphabet:
            raise KeyError(f"unknown symbol {r.symbol!r}")
        if len(r.children) != a.alphabet[r.symbol]:
            raise ValueError(f"arity mismatch at {r.symbol}")
        w = table.get((r.state, r.symbol, tuple(c.state for c in r.children)), 0.0)
        for c in r.children:
            w *= weight(c)
        return w

    value = _initial(a, start).get(run.state, 0.0) * weight(run)
    return _raise_if(nd, value, "run cylinder")


def _labelled_sum(a, tree, leaf, start):
    if not tree.is_proper(a.alphabet):
        raise ValueError(f"{tree} is not a proper partial tree over the alphabet")
    memo = {}

    def weight(node, x):
        key = (node, x)
        if key not in memo:
            if node.symbol == STAR:
                w = leaf[x]
            else:
                w = 0.0
                for t in a.delta(x, node.symbol):
                    if t.prob <= 0:
                        continue
                    term = t.prob
                    for c, y in zip(node.children, t.targets):
                        term *= weight(c, y)
                    w += term
            memo[key] = w
        return memo[key]

    return sum(p * weight(tree, x) for x, p in _initial(a, start).items())


def tree_cylinder_prob(a: Automaton, tree: PartialTree, policy: SolverPolicy = DEFAULT_POLICY,
                       start=None) -> float:
    """Probability that the generated tree extends ``tree`` and its run is accepting.

    Sums over all state labellings of ``tree`` that use positive-probability
    transitions; each ``*`` leaf contributes the acceptance probability of
    its state (acceptance depends only on the infinite tail of a branch).
    """
    _check_kind(a)
    acc = accprob(a, policy)
    return _raise_if(acc, _labelled_sum(a, tree, acc, start), "tree cylinder")


def prefix_prob(a: Automaton, tree: PartialTree, policy: SolverPolicy = DEFAULT_POLICY,
                start=None) -> float:
    """Like :func:`tree_cylinder_prob` with no-divergence at the leaves (acceptance ignored)."""
    _check_kind(a)
    nd = nodiv(a, policy)
    return _raise_if(nd, _labelled_sum(a, tree, nd, start), "prefix")


def total_mass(a: Automaton, policy: SolverPolicy = DEFAULT_POLICY) -> float:
    """Total probability of the accepted language."""
    acc = accprob(a, policy)
    value = sum(p * acc[x] for x, p in a.initial.items())
    return _raise_if(acc, value, "total mass")
