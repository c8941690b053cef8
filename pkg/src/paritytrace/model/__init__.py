from .automaton import (NONDET, PROB, Automaton, Transition, Violation,
                        compress_priorities, validate, validate_run)
from .textio import (ParseError, format_automaton, format_tree_file, parse_automaton,
                     parse_tree_file)
from .trees import (STAR, PartialRun, PartialTree, RankedAlphabet, RegularTree, RunGraph,
                    complete_partition, delst, universal_parity_check, unfold)

__all__ = [
    "NONDET", "PROB", "STAR",
    "Automaton", "Transition", "Violation", "RankedAlphabet",
    "RegularTree", "RunGraph", "PartialTree", "PartialRun",
    "ParseError", "parse_automaton", "format_automaton", "parse_tree_file", "format_tree_file",
    "compress_priorities", "validate", "validate_run",
    "unfold", "delst", "universal_parity_check", "complete_partition",
]
