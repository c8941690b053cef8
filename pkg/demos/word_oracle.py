"""Fixed-point acceptance probabilities against the bottom-SCC oracle.

Random word automata: the oracle finds the bottom strongly connected
components of the induced Markov chain, marks each one accepting when its
largest priority is even, and solves the reachability equations.
"""
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from generators import random_prob  # noqa: E402
from paritytrace import accprob  # noqa: E402
from paritytrace.oracles import bscc_report  # noqa: E402

rng = random.Random(5)
for _ in range(5):
    a = random_prob(rng, max_states=8, max_priority=4, word=True)
    rep = bscc_report(a)
    fix = accprob(a)
    gap = max(abs(fix[x] - rep.accept[x]) for x in a.states)
    print(f"{len(a.states)} states, {len(rep.bsccs)} bottom SCCs, "
          f"{sum(rep.accepting)} accepting, gap {gap:.1e}")
