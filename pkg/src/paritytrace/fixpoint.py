"""Equational systems of nested least/greatest fixed points.

A system is an ordered list of equations ``u_i =_eta f_i(u_1, ..., u_n)``
with ``eta`` either ``MU`` (least) or ``NU`` (greatest).  It is solved from
left to right: the first equation is solved as a function of the remaining
variables, substituted into the second one, and so on, until the last
equation is closed; the closed values are then pushed back from right to
left.  The order of the equations therefore matters.

Two lattice regimes are supported:

* finite lattices (two-point, powersets, products of these), where Kleene
  iteration reaches the fixed point exactly after finitely many steps;
* vectors over the unit interval, where Kleene iteration only converges in
  the limit and is stopped once the sup-norm step drops below a tolerance.
"""
from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field, replace
from operator import sub
from typing import Any, Callable, Iterator, Sequence

MU = "mu"
NU = "nu"

EXACT = "exact-finite"
OMEGA = "tolerant-omega"


class FixpointError(Exception):
    """Base class for solver errors."""


class MonotonicityError(FixpointError):
    """A Kleene chain moved in the wrong direction.

    Raised when a user-supplied function breaks its monotonicity contract.
    """

    def __init__(self, message, equation=None, iteration=None):
        if equation is not None:
            message = f"equation {equation}: {message}"
        super().__init__(message)
        self.equation = equation
        self.iteration = iteration


class NotConverged(FixpointError):
    """Raised by :meth:`Solution.raise_if_unconverged`; carries the last iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


# ---------------------------------------------------------------------------
# lattices


class Lattice:
    """A complete lattice with the operations the solver needs."""

    finite = True

    @property
    def bottom(self):
        raise NotImplementedError

    @property
    def top(self):
        raise NotImplementedError

    def leq(self, x, y, slack=0.0) -> bool:
        raise NotImplementedError

    def join(self, x, y):
        raise NotImplementedError

    def meet(self, x, y):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def distance(self, x, y) -> float:
        """Zero iff ``x == y``; sup-norm for interval vectors."""
        return 0.0 if x == y else float("inf")

    def sample(self, rng: random.Random):
        raise NotImplementedError

    def step(self, x, y, slack=0.0):
        """``(x <= y up to slack, y <= x up to slack, distance(x, y))`` in one pass."""
        return self.leq(x, y, slack), self.leq(y, x, slack), self.distance(x, y)


class TwoPoint(Lattice):
    """The booleans with ``False < True``."""

    bottom = False
    top = True

    def leq(self, x, y, slack=0.0):
        return (not x) or bool(y)

    def join(self, x, y):
        return bool(x or y)

    def meet(self, x, y):
        return bool(x and y)

    def contains(self, x):
        return isinstance(x, bool)

    def sample(self, rng):
        return rng.random() < 0.5

    def __repr__(self):
        return "TwoPoint()"

    def __eq__(self, other):
        return isinstance(other, TwoPoint)

    def __hash__(self):
        return hash(TwoPoint)


class Powerset(Lattice):
    """Subsets of a finite carrier, ordered by inclusion (elements are frozensets)."""

    def __init__(self, carrier):
        self.carrier = tuple(carrier)
        self._top = frozenset(self.carrier)

    @property
    def bottom(self):
        return frozenset()

    @property
    def top(self):
        return self._top

    def leq(self, x, y, slack=0.0):
        return x <= y

    def join(self, x, y):
        return x | y

    def meet(self, x, y):
        return x & y

    def contains(self, x):
        return isinstance(x, frozenset) and x <= self._top

    def sample(self, rng):
        return frozenset(c for c in self.carrier if rng.random() < 0.5)

    def __repr__(self):
        return f"Powerset({list(self.carrier)!r})"

    def __eq__(self, other):
        return isinstance(other, Powerset) and other.carrier == self.carrier

    def __hash__(self):
        return hash(("Powerset", self.carrier))


class IntervalVector(Lattice):
    """``[0, 1]^carrier`` with the pointwise order; elements are float tuples."""

    finite = False

    def __init__(self, carrier):
        self.carrier = tuple(carrier)
        self.index = {c: i for i, c in enumerate(self.carrier)}

    @property
    def bottom(self):
        return (0.0,) * len(self.carrier)

    @property
    def top(self):
        return (1.0,) * len(self.carrier)

    def leq(self, x, y, slack=0.0):
        return max(map(sub, x, y), default=0.0) <= slack

    def join(self, x, y):
        return tuple(max(a, b) for a, b in zip(x, y))

    def meet(self, x, y):
        return tuple(min(a, b) for a, b in zip(x, y))

    def contains(self, x):
        return len(x) == len(self.carrier) and all(0.0 <= v <= 1.0 for v in x)

    def distance(self, x, y):
        return max(map(abs, map(sub, x, y)), default=0.0)

    def step(self, x, y, slack=0.0):
        if not x:
            return True, True, 0.0
        d = list(map(sub, y, x))
        lo, hi = min(d), max(d)
        return lo >= -slack, hi <= slack, max(hi, -lo)

    def sample(self, rng):
        return tuple(rng.random() for _ in self.carrier)

    def __repr__(self):
        return f"IntervalVector({list(self.carrier)!r})"

    def __eq__(self, other):
        return isinstance(other, IntervalVector) and other.carrier == self.carrier

    def __hash__(self):
        return hash(("IntervalVector", self.carrier))


class Product(Lattice):
    """Cartesian product of lattices, ordered componentwise (elements are tuples)."""

    def __init__(self, factors: Sequence[Lattice]):
        self.factors = tuple(factors)
        self.finite = all(f.finite for f in self.factors)

    @property
    def bottom(self):
        return tuple(f.bottom for f in self.factors)

    @property
    def top(self):
        return tuple(f.top for f in self.factors)

    def leq(self, x, y, slack=0.0):
        return all(f.leq(a, b, slack) for f, a, b in zip(self.factors, x, y))

    def join(self, x, y):
        return tuple(f.join(a, b) for f, a, b in zip(self.factors, x, y))

    def meet(self, x, y):
        return tuple(f.meet(a, b) for f, a, b in zip(self.factors, x, y))

    def contains(self, x):
        return len(x) == len(self.factors) and all(
            f.contains(a) for f, a in zip(self.factors, x))

    def distance(self, x, y):
        return max((f.distance(a, b) for f, a, b in zip(self.factors, x, y)),
                   default=0.0)

    def sample(self, rng):
        return tuple(f.sample(rng) for f in self.factors)

    def __repr__(self):
        return f"Product({list(self.factors)!r})"

    def __eq__(self, other):
        return isinstance(other, Product) and other.factors == self.factors

    def __hash__(self):
        return hash(("Product", self.factors))


# ---------------------------------------------------------------------------
# policy and single fixpoints


@dataclass(frozen=True)
class SolverPolicy:
    """How Kleene chains are stopped.

    In ``EXACT`` mode a chain stops when two successive iterates are equal.
    In ``OMEGA`` mode it stops once their distance is below ``tolerance``
    and so is the geometric extrapolation ``step * r / (1 - r)`` of the
    remaining distance, ``r`` being the larger of the last two step ratios.
    ``slack`` is the amount an interval-vector chain may move backwards
    before it counts as a monotonicity violation; nested approximate
    solutions make tiny backward steps unavoidable.  ``warm_start`` lets
    :func:`solve` seed inner chains from earlier results where that is
    sound (see there).  Inside :func:`solve`, an equation nested ``d``
    levels below the outermost one stops at ``tolerance * nested_scale**d``
    (never below ``min_tolerance``), so that inner truncation error stays
    below the step size the enclosing chain can resolve; a chain whose
    step drops to ``NOISE_FACTOR`` times the inner tolerance stops, as its
    function is not known more precisely than that.
    """

    tolerance: float = 1e-9
    max_iterations: int = 10**6
    mode: str = OMEGA
    slack: float = 1e-7
    warm_start: bool = True
    nested_scale: float = 0.01
    min_tolerance: float = 1e-14

    def __post_init__(self):
        if self.mode not in (EXACT, OMEGA):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if self.tolerance == 0 and self.mode != EXACT:
            raise ValueError("tolerance 0 is only allowed in exact-finite mode")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0 < self.nested_scale <= 1:
            raise ValueError("nested_scale must lie in (0, 1]")

    def at_depth(self, depth: int) -> "SolverPolicy":
        if self.mode == EXACT or depth == 0:
            return self
        tol = max(self.tolerance * self.nested_scale ** depth,
                  min(self.min_tolerance, self.tolerance))
        return replace(self, tolerance=tol)

    @classmethod
    def exact(cls, max_iterations=10**6, warm_start=True):
        return cls(tolerance=0.0, max_iterations=max_iterations, mode=EXACT,
                   warm_start=warm_start)


DEFAULT_POLICY = SolverPolicy()

ROUND_OFF = 16 * sys.float_info.epsilon

# inner truncation error is amplified by slow inner chains, so the step
# size below which an enclosing chain only sees noise is taken this many
# times the inner tolerance
NOISE_FACTOR = 10.0


@dataclass
class FixpointResult:
    """``residual`` is the estimated distance from ``value`` to the fixed
    point when converged, and the last step size otherwise."""

    value: Any
    polarity: str
    iterations: int
    converged: bool
    residual: float


def kleene_chain(f: Callable, lattice: Lattice, polarity: str, start=None) -> Iterator:
    """Yield ``x, f(x), f(f(x)), ...`` starting from bottom (MU) or top (NU)."""
    if start is None:
        start = lattice.bottom if polarity == MU else lattice.top
    x = start
    while True:
        yield x
        x = f(x)


def _fixpoint(f, lattice, polarity, policy, equation=None, start=None, floor=0.0,
              noise=(0.0,)):
    # noise[0] is the error of f's latest value, as reported by whatever
    # approximate solutions f is built from; f may update it in place
    slack = 0.0 if lattice.finite else policy.slack
    if not lattice.finite:
        # a step of a few ulps is a floating-point fixed point; iterating on
        # lets rounding push a chain off an unstable fixed point
        floor = max(floor, ROUND_OFF)
    if start is None:
        start = lattice.bottom if polarity == MU else lattice.top
    x = start
    step = prev = float("inf")
    for k in range(1, policy.max_iterations + 1):
        y = f(x)
        up, down, dist = lattice.step(x, y, slack)
        if not (up if polarity == MU else down):
            direction = "descended" if polarity == MU else "ascended"
            raise MonotonicityError(
                f"{polarity}-chain {direction} at iteration {k}",
                equation=equation, iteration=k)
        prev2, prev, step = prev, step, dist
        x = y
        # f is only known to within the floor, so smaller steps are noise
        blur = max(floor, 2 * noise[0])
        if step <= blur or (policy.mode == OMEGA and step < policy.tolerance):
            # geometric estimate of the distance still to go; the larger of
            # the last two ratios, since coordinates feeding each other make
            # the sup-norm ratio alternate
            rate = max(step / prev, prev / prev2) if prev2 < float("inf") else 1.0
            togo = step * rate / (1 - rate) if rate < 1 else step
            if step <= blur or (rate < 1 and togo < policy.tolerance):
                return FixpointResult(x, polarity, k, True, togo + noise[0])
    return FixpointResult(x, polarity, policy.max_iterations, False, step)


def lfp(f: Callable, lattice: Lattice, policy: SolverPolicy = DEFAULT_POLICY) -> FixpointResult:
    """Least fixed point of a monotone ``f`` by the ascending chain from bottom."""
    return _fixpoint(f, lattice, MU, policy)


def gfp(f: Callable, lattice: Lattice, policy: SolverPolicy = DEFAULT_POLICY) -> FixpointResult:
    """Greatest fixed point of a monotone ``f`` by the descending chain from top."""
    return _fixpoint(f, lattice, NU, policy)


# ---------------------------------------------------------------------------
# equational systems


@dataclass(frozen=True)
class Equation:
    var: str
    polarity: str
    lattice: Lattice
    f: Callable[[tuple], Any]

    def __post_init__(self):
        if self.polarity not in (MU, NU):
            raise ValueError(f"polarity must be {MU!r} or {NU!r}, got {self.polarity!r}")


class EquationalSystem:
    """An ordered sequence of :class:`Equation`.

    Each ``f`` receives the full assignment as a tuple ``(l_1, ..., l_n)``
    and must return an element of its own equation's lattice.
    """

    def __init__(self, equations: Sequence[Equation]):
        self.equations = tuple(equations)
        names = [e.var for e in self.equations]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variables in {names}")

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def __getitem__(self, i):
        return self.equations[i]

    @property
    def variables(self):
        return tuple(e.var for e in self.equations)

    def reordered(self, order: Sequence[int]) -> "EquationalSystem":
        """Same equations in a different order; the functions keep their meaning."""
        order = list(order)
        if sorted(order) != list(range(len(self))):
            raise ValueError("order must be a permutation")
        # new position p holds old equation order[p]
        inverse = {old: new for new, old in enumerate(order)}

        def wrap(f):
            return lambda ls: f(tuple(ls[inverse[i]] for i in range(len(order))))

        return EquationalSystem(
            [Equation(self[o].var, self[o].polarity, self[o].lattice, wrap(self[o].f))
             for o in order])


@dataclass
class EquationDiagnostics:
    var: str
    polarity: str
    solves: int = 0
    iterations: int = 0
    unconverged: int = 0
    max_residual: float = 0.0


@dataclass
class Solution:
    values: tuple
    variables: tuple
    diagnostics: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return all(d.unconverged == 0 for d in self.diagnostics)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.values[self.variables.index(key)]
        return self.values[key]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def raise_if_unconverged(self):
        bad = [i for i, d in enumerate(self.diagnostics) if d.unconverged]
        if bad:
            raise NotConverged(f"equations {bad} did not converge", last=self.values)


def solve(system: EquationalSystem, policy: SolverPolicy = DEFAULT_POLICY) -> Solution:
    """Solve ``system`` by left-to-right elimination.

    The interim solution of equation ``j`` is recomputed for every value of
    the later variables that the enclosing chains produce.  With
    ``policy.warm_start`` a recomputation may start from an earlier result
    of the same equation instead of bottom/top, but only when that result
    is provably below (mu) or above (nu) the new fixed point: every later
    variable moved in the same direction since it was computed.  Values are
    never reused as answers, only as chain seeds.

    Non-convergence of an inner chain is recorded in the diagnostics of its
    equation (the last iterate is used); monotonicity violations raise
    :class:`MonotonicityError` labelled with the equation index.
    """
    eqs = system.equations
    n = len(eqs)
    diags = [EquationDiagnostics(e.var, e.polarity) for e in eqs]
    seeds = [{} for _ in eqs]
    policies = [policy.at_depth(n - 1 - j) for j in range(n)]
    # the accuracy of the interim solutions that g(x) is built from
    floors = [0.0 if j == 0 or policy.mode == EXACT else NOISE_FACTOR * policies[j - 1].tolerance
              for j in range(n)]

    later_leq = [[e.lattice.leq for e in eqs[j + 1:]] for j in range(n)]

    def usable(j, old_params, params):
        lo, hi = (old_params, params) if eqs[j].polarity == MU else (params, old_params)
        for leq, a, b in zip(later_leq[j], lo, hi):
            if not leq(a, b):
                return False
        return True

    # positions, among the later variables, of those with the opposite polarity
    opposite = [[k for k, e in enumerate(eqs[j + 1:]) if e.polarity != eqs[j].polarity]
                for j in range(n)]

    def interim(i, params, counters):
        # values of equations 0..i-1 as functions of the fixed later values,
        # and the largest error reported for them; counters[k] is the
        # position of params[k] in its own Kleene chain
        j = i - 1
        eq = eqs[j]
        start = None
        if policy.warm_start:
            key = tuple([counters[k] for k in opposite[j]])
            if key in seeds[j]:
                old_params, old_value = seeds[j][key]
                if usable(j, old_params, params):
                    start = old_value
        calls = 0
        f = eq.f
        noise = [0.0]

        if j == 0:
            def g(x):
                return f((x,) + params)
        else:
            def g(x):
                nonlocal calls
                inner, noise[0] = interim(j, (x,) + params, (calls,) + counters)
                calls += 1
                return f(inner + (x,) + params)

        res = _fixpoint(g, eq.lattice, eq.polarity, policies[j], equation=j, start=start,
                        floor=floors[j], noise=noise)
        d = diags[j]
        d.solves += 1
        d.iterations += res.iterations
        d.max_residual = max(d.max_residual, res.residual)
        if not res.converged:
            d.unconverged += 1
        if policy.warm_start:
            seeds[j][key] = (params, res.value)
        if j == 0:
            return (res.value,), res.residual
        inner, err = interim(j, (res.value,) + params, (calls,) + counters)
        return inner + (res.value,), max(res.residual, err)

    if n == 0:
        return Solution((), (), diags)
    values, _ = interim(n, (), ())
    return Solution(values, system.variables, diags)


def is_fixed_point(system: EquationalSystem, candidate, tolerance: float = 0.0) -> bool:
    """Check ``f_i(candidate) == candidate_i`` for every equation.

    Exact on finite lattices; within ``tolerance`` (sup-norm) otherwise.
    """
    values = tuple(candidate)
    if len(values) != len(system):
        raise ValueError(
            f"candidate has {len(values)} components, system has {len(system)}")
    for eq, v in zip(system, values):
        w = eq.f(values)
        if eq.lattice.finite:
            if w != v:
                return False
        elif eq.lattice.distance(v, w) > tolerance:
            return False
    return True


def audit_monotonicity(system: EquationalSystem, samples: int = 100, seed: int = 0):
    """Randomised spot check of the monotonicity contract.

    Draws pairs ``x <= y`` of full assignments and returns the indices of
    equations with ``f_i(x) not <= f_i(y)``.
    """
    rng = random.Random(seed)
    bad = set()
    for _ in range(samples):
        x = tuple(e.lattice.sample(rng) for e in system)
        y = tuple(e.lattice.join(a, e.lattice.sample(rng)) for e, a in zip(system, x))
        for i, e in enumerate(system):
            if not e.lattice.leq(e.f(x), e.f(y), 1e-12):
                bad.add(i)
    return sorted(bad)
