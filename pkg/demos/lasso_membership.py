"""Membership of lasso words in a nondeterministic parity automaton.

A1 reads a in x1 (priority 1) and b in x2 (priority 2).  A branch is
accepted when the largest priority seen infinitely often is even, so
(ab)^omega is in the language and a^omega is not.  The fixed-point answer
is compared with a brute-force search over positional runs.
"""
from paritytrace import member, nonempty, parse_automaton, parse_tree_file
from paritytrace.oracles import positional_member

A1 = parse_automaton("""
automaton A1
kind nondet
symbol a 1
symbol b 1
state x1 1
state x2 2
init x1
trans x1 a ( x1 )
trans x1 b ( x2 )
trans x2 a ( x1 )
trans x2 b ( x2 )
""")

words = {
    "(ab)^w": "tree ab\nnode n0 a ( n1 )\nnode n1 b ( n0 )\nroot n0\n",
    "a^w": "tree aw\nnode n0 a ( n0 )\nroot n0\n",
    "b^w": "tree bw\nnode n0 b ( n0 )\nroot n0\n",
    "ab^w": "tree abw\nnode n0 a ( n1 )\nnode n1 b ( n1 )\nroot n0\n",
}

print("language nonempty:", nonempty(A1))
for name, text in words.items():
    t = parse_tree_file(text)
    print(f"{name:7} fixpoint={member(A1, t)!s:5} search={positional_member(A1, t)}")
