"""Command-line front end.

Every subcommand prints one ``key value`` line per result on stdout.
Exit status: 0 success (a ``false`` answer is still success), 1 usage
error, 2 invalid input, 3 a fixed point did not converge.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import nondet, oracles, prob
from .fixpoint import FixpointError, NotConverged, SolverPolicy
from .model import (NONDET, PROB, PartialRun, PartialTree, RegularTree, RunGraph,
                    parse_automaton, parse_tree_file, validate)

OK, USAGE, INVALID, UNCONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _num(v):
    return f"{v:.12f}"


def _bool(b):
    return "true" if b else "false"


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def _automaton(path, kind=None):
    try:
        a = parse_automaton(_read(path))
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None
    bad = validate(a)
    if bad:
        raise InputError("\n".join(f"{path}: {v}" for v in bad))
    if kind is not None and a.kind != kind:
        raise InputError(f"{path}: expected a {kind} automaton, got {a.kind}")
    return a


def _regular_tree(path):
    try:
        t = parse_tree_file(_read(path))
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None
    if not isinstance(t, RegularTree):
        raise InputError(f"{path}: expected a tree file, got a run")
    return t


def _partial(arg, run):
    """A partial tree/run from a file path, or from an inline term such as ``hd(*)``."""
    want = RunGraph if run else RegularTree
    try:
        if os.path.exists(arg):
            g = parse_tree_file(_read(arg))
            if not isinstance(g, want):
                raise InputError(f"{arg}: expected a {'run' if run else 'tree'} file")
            return g.to_partial()
        return (PartialRun if run else PartialTree).parse(arg)
    except ValueError as e:
        raise InputError(f"{arg}: {e}") from None


def _policy(args):
    return SolverPolicy(tolerance=args.tol, max_iterations=args.max_iters)


def _start(a, args):
    if args.start is not None and args.start not in a.priority:
        raise InputError(f"unknown state {args.start!r}")
    return args.start


def _vector(vec):
    prefix = "" if vec.converged else "UNCONVERGED "
    lines = [f"{prefix}{x} {_num(vec[x])}" for x in vec.states]
    return lines, OK if vec.converged else UNCONVERGED


def _scalar(key, compute):
    try:
        return [f"{key} {_num(compute())}"], OK
    except NotConverged as e:
        return [f"UNCONVERGED {key} {_num(e.last)}"], UNCONVERGED


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args):
    try:
        a = parse_automaton(_read(args.automaton))
    except ValueError as e:
        raise InputError(f"{args.automaton}: {e}") from None
    bad = validate(a)
    lines = [f"valid {_bool(not bad)}", f"kind {a.kind}", f"states {len(a.states)}",
             f"symbols {len(a.alphabet)}", f"priorities {a.num_priorities}"]
    lines += [f"violation {v}" for v in bad]
    return lines, INVALID if bad else OK


def cmd_empty(args):
    a = _automaton(args.automaton, NONDET)
    return [f"nonempty {_bool(nondet.nonempty(a))}"], OK


def cmd_member(args):
    a = _automaton(args.automaton, NONDET)
    t = _regular_tree(args.tree)
    try:
        return [f"member {_bool(nondet.member(a, t))}"], OK
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_accept_states(args):
    a = _automaton(args.automaton, NONDET)
    acc = nondet.accepting_states(a)
    return [f"{x} {_bool(x in acc)}" for x in a.states], OK


def cmd_accprob(args):
    a = _automaton(args.automaton, PROB)
    return _vector(prob.accprob(a, _policy(args)))


def cmd_nodiv(args):
    a = _automaton(args.automaton, PROB)
    return _vector(prob.nodiv(a, _policy(args)))


def cmd_cyl_tree(args):
    a = _automaton(args.automaton, PROB)
    tree = _partial(args.tree, run=False)
    if not tree.is_proper(a.alphabet):
        raise InputError(f"{tree} is not a proper partial tree over the alphabet")
    start = _start(a, args)
    return _scalar("cylinder", lambda: prob.tree_cylinder_prob(a, tree, _policy(args), start))


def cmd_cyl_run(args):
    a = _automaton(args.automaton, PROB)
    run = _partial(args.run, run=True)
    start = _start(a, args)
    try:
        return _scalar("cylinder", lambda: prob.run_cylinder_prob(a, run, _policy(args), start))
    except (KeyError, ValueError) as e:
        raise InputError(str(e).strip("'\"")) from None


def cmd_total(args):
    a = _automaton(args.automaton, PROB)
    return _scalar("total", lambda: prob.total_mass(a, _policy(args)))


def cmd_oracle_bscc(args):
    a = _automaton(args.automaton, PROB)
    try:
        rep = oracles.bscc_report(a)
    except ValueError as e:
        raise InputError(str(e)) from None
    lines = [f"bscc {','.join(''.join(v) if isinstance(v, tuple) else v for v in comp)} "
             f"{'accepting' if ok else 'rejecting'}"
             for comp, ok in zip(rep.bsccs, rep.accepting)]
    lines += [f"{x} {_num(rep.accept[x])}" for x in a.states]
    return lines, OK


def cmd_oracle_member(args):
    a = _automaton(args.automaton, NONDET)
    t = _regular_tree(args.tree)
    try:
        return [f"member {_bool(oracles.positional_member(a, t))}"], OK
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_mc(args):
    a = _automaton(args.automaton, PROB)
    tree = _partial(args.tree, run=False)
    if not tree.is_proper(a.alphabet):
        raise InputError(f"{tree} is not a proper partial tree over the alphabet")
    start = _start(a, args)
    if start is not None:
        a = a.with_initial(start)
    est = oracles.monte_carlo_cylinder(a, tree, args.samples, args.seed, args.depth)
    lines = [f"estimate {_num(est.estimate)}", f"stderr {_num(est.stderr)}",
             f"hits {est.hits}", f"samples {est.samples}", f"seed {est.seed}",
             f"depth_cap {est.depth_cap}"]
    try:
        target = prob.prefix_prob(a, tree, _policy(args))
    except NotConverged as e:
        lines += [f"UNCONVERGED prefix {_num(e.last)}", "within_3se unknown", f"note {est.note}"]
        return lines, UNCONVERGED
    lines += [f"prefix {_num(target)}", f"within_3se {_bool(est.within(target, slack=args.tol))}",
              f"note {est.note}"]
    return lines, OK


COMMANDS = {
    "check": (cmd_check, "validate an automaton file", ["automaton"]),
    "empty": (cmd_empty, "is the language of a nondet automaton nonempty", ["automaton"]),
    "member": (cmd_member, "is a regular tree accepted by a nondet automaton", ["automaton", "tree"]),
    "accept-states": (cmd_accept_states, "states with some accepting run", ["automaton"]),
    "accprob": (cmd_accprob, "acceptance probability per state", ["automaton"]),
    "nodiv": (cmd_nodiv, "no-divergence probability per state", ["automaton"]),
    "cyl-tree": (cmd_cyl_tree, "measure of the accepted trees extending a partial tree",
                 ["automaton", "tree"]),
    "cyl-run": (cmd_cyl_run, "measure of the runs extending a partial run", ["automaton", "run"]),
    "total": (cmd_total, "total probability of the accepted language", ["automaton"]),
    "oracle-bscc": (cmd_oracle_bscc, "bottom-SCC acceptance probabilities (word automata)",
                    ["automaton"]),
    "oracle-member": (cmd_oracle_member, "membership by exhaustive positional search",
                      ["automaton", "tree"]),
    "mc": (cmd_mc, "Monte Carlo estimate of a prefix probability", ["automaton", "tree"]),
}

_HELP = {
    "automaton": "automaton file",
    "tree": "tree file, or an inline term such as 'hd(*)' where a partial tree is expected",
    "run": "run file, or an inline term such as 'hd@x(*@x)'",
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="paritytrace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, help_text, positionals) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text, description=help_text)
        for pos in positionals:
            s.add_argument(pos, help=_HELP[pos])
        s.add_argument("--tol", type=_positive_float, default=1e-9,
                       help="convergence tolerance (default 1e-9)")
        s.add_argument("--max-iters", type=_positive_int, default=10**6,
                       help="iteration cap per fixed point (default 1e6)")
        s.add_argument("--start", default=None, help="start in this state instead of the initial distribution")
        s.add_argument("--samples", type=_positive_int, default=10**5)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--depth", type=_nonneg_int, default=30, help="Monte Carlo depth cap")
    return p


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        parser.print_usage(err)
        print(e, file=err)
        return USAGE
    except SystemExit as e:
        # --help
        return OK if not e.code else USAGE
    handler = COMMANDS[args.command][0]
    try:
        lines, code = handler(args)
    except InputError as e:
        print(e, file=err)
        return INVALID
    except FixpointError as e:
        print(f"error: {e}", file=err)
        return INVALID
    for line in lines:
        print(line, file=out)
    if code == UNCONVERGED:
        print("fixed-point iteration stopped at --max-iters before reaching --tol", file=err)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
