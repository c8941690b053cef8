"""The same two equations, solved in two orders, give opposite answers.

u =mu v and v =nu u over the two-point lattice.  Solving u first makes its
interim solution the identity in v, and the outer nu-chain then settles on
top.  Solving v first does the dual and ends at bottom.
"""
from paritytrace import MU, NU, Equation, EquationalSystem, SolverPolicy, TwoPoint, solve

B = TwoPoint()
exact = SolverPolicy.exact()

mu_first = EquationalSystem([Equation("u", MU, B, lambda ls: ls[1]),
                             Equation("v", NU, B, lambda ls: ls[0])])
nu_first = EquationalSystem([Equation("v", NU, B, lambda ls: ls[1]),
                             Equation("u", MU, B, lambda ls: ls[0])])

for label, system in (("u first", mu_first), ("v first", nu_first)):
    sol = solve(system, exact)
    print(f"{label}: u={sol['u']} v={sol['v']}")
