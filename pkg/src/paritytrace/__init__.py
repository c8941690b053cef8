"""Languages of parity tree automata via nested least/greatest fixed points."""
from .fixpoint import (EXACT, MU, NU, OMEGA, Equation, EquationalSystem, IntervalVector,
                       MonotonicityError, NotConverged, Powerset, Product, SolverPolicy,
                       TwoPoint, gfp, is_fixed_point, lfp, solve)
from .model import (Automaton, PartialRun, PartialTree, RankedAlphabet, RegularTree, RunGraph,
                    Transition, parse_automaton, parse_tree_file, validate)
from .nondet import accepting_states, member, nonempty
from .prob import (ProbVector, accprob, nodiv, prefix_prob, run_cylinder_prob, total_mass,
                   tree_cylinder_prob)

__version__ = "0.1.0"
