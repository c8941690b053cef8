"""Seeded random automata and trees for property tests."""
import random

from paritytrace.model import NONDET, PROB, Automaton, RankedAlphabet, RegularTree, Transition


def random_nondet(rng: random.Random, max_states=5, max_symbols=3, max_arity=2,
                  max_trans=3, max_priority=4):
    n_sym = rng.randint(1, max_symbols)
    alphabet = RankedAlphabet({f"s{i}": rng.randint(0, max_arity) for i in range(n_sym)})
    n = rng.randint(1, max_states)
    states = {f"q{i}": rng.randint(1, max_priority) for i in range(n)}
    names = list(states)
    trans = {}
    for x in names:
        seen = {}
        for _ in range(rng.randint(0, max_trans)):
            sym = rng.choice(list(alphabet))
            targets = tuple(rng.choice(names) for _ in range(alphabet[sym]))
            seen[sym, targets] = Transition(sym, targets)
        trans[x] = list(seen.values())
    init = [x for x in names if rng.random() < 0.5] or [names[0]]
    return Automaton(alphabet, states, trans, init, NONDET)


def random_tree(rng: random.Random, alphabet, max_nodes=4):
    n = rng.randint(1, max_nodes)
    ids = [f"n{i}" for i in range(n)]
    syms = list(alphabet)
    nodes = {}
    for v in ids:
        sym = rng.choice(syms)
        nodes[v] = (sym, [rng.choice(ids) for _ in range(alphabet[sym])])
    return RegularTree(nodes, ids[0])


def random_prob(rng: random.Random, max_states=6, max_symbols=3, max_arity=2,
                max_trans=3, max_priority=4, word=False, stochastic=None):
    n_sym = rng.randint(1, max_symbols)
    if word:
        arities = {f"s{i}": (1 if i == 0 else rng.choice([0, 1, 1])) for i in range(n_sym)}
    else:
        arities = {f"s{i}": rng.randint(0, max_arity) for i in range(n_sym)}
    alphabet = RankedAlphabet(arities)
    n = rng.randint(1, max_states)
    states = {f"q{i}": rng.randint(1, max_priority) for i in range(n)}
    names = list(states)
    trans = {}
    full = rng.random() < 0.5 if stochastic is None else stochastic
    for x in names:
        opts = {}
        for _ in range(rng.randint(1, max_trans)):
            sym = rng.choice(list(alphabet))
            opts[sym, tuple(rng.choice(names) for _ in range(alphabet[sym]))] = None
        weights = [rng.random() + 0.05 for _ in opts]
        # keep substochastic rows well away from 1: near-stochastic rows make
        # Kleene chains converge arbitrarily slowly
        mass = 1.0 if full else round(rng.uniform(0.5, 0.95), 3)
        total = sum(weights)
        probs = [round(w / total * mass, 6) for w in weights[:-1]]
        probs.append(round(mass - sum(probs), 6))
        trans[x] = [Transition(sym, tg, p) for (sym, tg), p in zip(opts, probs)]
    init = {names[0]: 1.0}
    return Automaton(alphabet, states, trans, init, PROB)
