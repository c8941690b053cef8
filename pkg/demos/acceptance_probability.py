"""Acceptance and divergence probabilities of a small branching automaton.

x emits leaf, f(x, y) or g(y); y emits leaf or g(y) and otherwise loses
mass.  Priorities 1 for x and 2 for y.  By hand, y = 0.2 + 0.7 y gives
2/3, and x = 0.4 + 0.3 x y + 0.3 y gives 3/4.
"""
from paritytrace import (PartialTree, accprob, nodiv, parse_automaton, prefix_prob,
                         total_mass, tree_cylinder_prob)
from paritytrace.model import complete_partition
from paritytrace.oracles import monte_carlo_cylinder

a = parse_automaton("""
automaton branching
kind prob
symbol leaf 0
symbol f 2
symbol g 1
state x 1
state y 2
init x 1.0
trans x leaf ( ) 0.4
trans x f ( x , y ) 0.3
trans x g ( y ) 0.3
trans y leaf ( ) 0.2
trans y g ( y ) 0.7
""")

acc, nd = accprob(a), nodiv(a)
for x in a.states:
    print(f"{x}: accprob {acc[x]:.9f}  nodiv {nd[x]:.9f}")

# the cylinders of a complete partition add up to the total mass
total = total_mass(a)
for depth in range(4):
    parts = complete_partition(a.alphabet, depth)
    s = sum(tree_cylinder_prob(a, t) for t in parts)
    print(f"depth {depth}: {len(parts):4d} cylinders, sum {s:.9f} vs total {total:.9f}")

# sampling agrees with the exact prefix probability
t = PartialTree.parse("f(*,g(*))")
exact = prefix_prob(a, t)
est = monte_carlo_cylinder(a, t, 20000, seed=1)
print(f"P[f(*,g(*))] exact {exact:.5f}, sampled {est.estimate:.5f} +- {est.stderr:.5f}")
