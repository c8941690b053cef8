import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paritytrace.fixpoint import (EXACT, MU, NU, OMEGA, Equation, EquationalSystem,
                                  IntervalVector, MonotonicityError, NotConverged, Powerset,
                                  Product, SolverPolicy, TwoPoint, audit_monotonicity, gfp,
                                  is_fixed_point, kleene_chain, lfp, solve)

EXACT_POLICY = SolverPolicy.exact()
UNIT = IntervalVector(["u"])


def two_point_pair(first_mu=True):
    """(u =mu v, v =nu u), or the same two equations in the other order."""
    B = TwoPoint()
    if first_mu:
        return EquationalSystem([Equation("u", MU, B, lambda ls: ls[1]),
                                 Equation("v", NU, B, lambda ls: ls[0])])
    return EquationalSystem([Equation("v", NU, B, lambda ls: ls[1]),
                             Equation("u", MU, B, lambda ls: ls[0])])


# ---------------------------------------------------------------------------
# lattices


LATTICES = [TwoPoint(), Powerset("abc"), IntervalVector("xy"),
            Product([TwoPoint(), Powerset([1, 2]), IntervalVector("z")])]


@pytest.mark.parametrize("L", LATTICES, ids=repr)
def test_lattice_bounds_and_join_meet(L):
    rng = random.Random(4)
    for _ in range(50):
        x, y = L.sample(rng), L.sample(rng)
        assert L.contains(x)
        assert L.leq(L.bottom, x) and L.leq(x, L.top)
        j, m = L.join(x, y), L.meet(x, y)
        assert L.leq(x, j) and L.leq(y, j)
        assert L.leq(m, x) and L.leq(m, y)
        assert L.leq(x, y) == (L.join(x, y) == y)


def test_interval_vector_coordinates_stay_in_unit_interval():
    L = IntervalVector("abcd")
    rng = random.Random(0)
    assert all(0.0 <= c <= 1.0 for _ in range(100) for c in L.sample(rng))
    assert not L.contains((0.5, 1.2, 0.0, 0.0))


# ---------------------------------------------------------------------------
# single fixpoints


def test_lfp_identity_two_point_is_bottom():
    assert lfp(lambda u: u, TwoPoint(), EXACT_POLICY).value is False


def test_gfp_identity_two_point_is_top():
    assert gfp(lambda u: u, TwoPoint(), EXACT_POLICY).value is True


def test_lfp_halving_is_zero():
    res = lfp(lambda p: (p[0] / 2,), UNIT)
    assert res.converged and res.value == (0.0,)


def test_lfp_affine_approaches_one():
    res = lfp(lambda p: (0.5 * p[0] + 0.5,), UNIT, SolverPolicy(tolerance=1e-9))
    assert res.converged
    assert abs(res.value[0] - 1.0) <= 1e-8


def test_gfp_halving_approaches_zero():
    res = gfp(lambda p: (p[0] / 2,), UNIT, SolverPolicy(tolerance=1e-9))
    assert res.converged
    assert abs(res.value[0]) <= 1e-8


def test_gfp_intersection_with_constant():
    L = Powerset([1, 2, 3])
    assert gfp(lambda s: s & {1, 2}, L, EXACT_POLICY).value == frozenset({1, 2})


def test_affine_chain_matches_closed_form():
    chain = kleene_chain(lambda p: (0.5 * p[0] + 0.5,), UNIT, MU)
    for k, x in zip(range(30), chain):
        assert x[0] == 1 - 2.0 ** -k


def test_unconverged_is_reported_with_last_iterate():
    res = lfp(lambda p: (0.5 * p[0] + 0.5,), UNIT, SolverPolicy(max_iterations=5))
    assert not res.converged
    assert res.iterations == 5
    assert res.value == (1 - 2.0 ** -5,)


def test_non_monotone_step_is_a_contract_violation():
    with pytest.raises(MonotonicityError):
        lfp(lambda b: not b, TwoPoint(), EXACT_POLICY)
    with pytest.raises(MonotonicityError):
        gfp(lambda p: (0.0,) if p[0] == 1.0 else (1.0,), UNIT)


def test_zero_tolerance_only_in_exact_mode():
    SolverPolicy(tolerance=0.0, mode=EXACT)
    with pytest.raises(ValueError):
        SolverPolicy(tolerance=0.0, mode=OMEGA)
    with pytest.raises(ValueError):
        SolverPolicy(max_iterations=0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_fixpoints_are_monotone_in_the_function(a, b, c, d):
    # f(u) = a u + b and g(u) = a' u + b' with a <= a', b <= b', all maps into [0, 1]
    b = b * (1 - a)
    a2 = a + c * (1 - a - b)
    b2 = b + d * (1 - a2 - b)
    F = lambda p: (a * p[0] + b,)  # noqa: E731
    G = lambda p: (a2 * p[0] + b2,)  # noqa: E731
    for u in (0.0, 0.5, 1.0):
        assert F((u,))[0] <= G((u,))[0] <= 1.0 + 1e-12
    policy = SolverPolicy(max_iterations=10**5)
    assert lfp(F, UNIT, policy).value[0] <= lfp(G, UNIT, policy).value[0] + 1e-7
    assert gfp(F, UNIT, policy).value[0] <= gfp(G, UNIT, policy).value[0] + 1e-7


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 5)), st.sets(st.integers(0, 5)))
def test_exact_mode_terminates_within_lattice_height(keep, add):
    L = Powerset(range(6))

    def f(s):
        return frozenset(s & keep) | frozenset(x + 1 for x in s if x + 1 in add) | ({0} & keep)
    for res in (lfp(f, L, EXACT_POLICY), gfp(f, L, EXACT_POLICY)):
        assert res.converged
        assert res.iterations <= len(L.carrier) + 1
        assert f(res.value) == res.value


def test_chains_move_in_one_direction():
    f = lambda p: (0.3 * p[0] + 0.2 * p[1], 0.5 * p[0] + 0.4)  # noqa: E731
    L = IntervalVector("ab")
    for pol, ordered in ((MU, lambda x, y: L.leq(x, y)), (NU, lambda x, y: L.leq(y, x))):
        chain = kleene_chain(f, L, pol)
        prev = next(chain)
        for _, x in zip(range(200), chain):
            assert ordered(prev, x)
            prev = x


# ---------------------------------------------------------------------------
# systems


def test_order_of_equations_matters():
    sol = solve(two_point_pair(first_mu=True), EXACT_POLICY)
    assert (sol["u"], sol["v"]) == (True, True)
    sol = solve(two_point_pair(first_mu=False), EXACT_POLICY)
    assert (sol["v"], sol["u"]) == (False, False)


def test_reordered_reproduces_other_order():
    sol = solve(two_point_pair(first_mu=True).reordered([1, 0]), EXACT_POLICY)
    assert tuple(sol) == (False, False)


def test_single_nu_equation_of_half_plus_half():
    system = EquationalSystem([Equation("u", NU, UNIT, lambda ls: (0.5 * ls[0][0] + 0.5 * ls[0][0],))])
    assert solve(system)["u"] == (1.0,)


def test_is_fixed_point():
    system = two_point_pair()
    assert is_fixed_point(system, (True, True))
    assert not is_fixed_point(system, (False, True))
    with pytest.raises(ValueError):
        is_fixed_point(system, (True,))


def test_duplicate_variables_rejected():
    B = TwoPoint()
    with pytest.raises(ValueError):
        EquationalSystem([Equation("u", MU, B, lambda ls: ls[0]), Equation("u", NU, B, lambda ls: ls[0])])


def test_unconverged_inner_chain_is_recorded():
    system = EquationalSystem([
        Equation("u", MU, UNIT, lambda ls: (0.5 * ls[0][0] + 0.5 * ls[1][0],)),
        Equation("v", NU, UNIT, lambda ls: ls[0]),
    ])
    sol = solve(system, SolverPolicy(max_iterations=3))
    assert not sol.converged
    with pytest.raises(NotConverged) as info:
        sol.raise_if_unconverged()
    assert info.value.last == tuple(sol)


def random_boolean_system(rng, n):
    """Random monotone system over powersets of {0,1,2}: each f is a union of meets."""
    L = Powerset(range(3))
    eqs = []
    for i in range(n):
        clauses = [(rng.randrange(n), frozenset(rng.sample(range(3), rng.randint(0, 3))))
                   for _ in range(rng.randint(1, 3))]
        const = frozenset(rng.sample(range(3), rng.randint(0, 1)))

        def f(ls, clauses=clauses, const=const):
            out = set(const)
            for j, mask in clauses:
                out |= ls[j] & mask
            return frozenset(out)
        eqs.append(Equation(f"u{i}", rng.choice([MU, NU]), L, f))
    return EquationalSystem(eqs)


def brute_force(system):
    """Solve a small finite system straight from the definition, no warm starts or chains."""
    eqs = system.equations
    carrier = sorted(eqs[0].lattice.carrier)
    elements = [frozenset(c for k, c in enumerate(carrier) if mask >> k & 1)
                for mask in range(2 ** len(carrier))]

    def interim(i, params):
        if i == 0:
            return ()
        j = i - 1
        fixed = [x for x in elements
                 if eqs[j].f(interim(j, (x,) + params) + (x,) + params) == x]
        pick = (min if eqs[j].polarity == MU else max)(fixed, key=len)
        # fixed points of a monotone map form a lattice, so the extreme one is unique
        for x in fixed:
            assert (pick <= x) if eqs[j].polarity == MU else (x <= pick)
        return interim(j, (pick,) + params) + (pick,)
    return interim(len(eqs), ())


@pytest.mark.parametrize("seed", range(40))
def test_solve_matches_definition_on_small_boolean_systems(seed):
    rng = random.Random(seed)
    system = random_boolean_system(rng, rng.randint(1, 3))
    expected = brute_force(system)
    for warm in (True, False):
        sol = solve(system, SolverPolicy.exact(warm_start=warm))
        assert tuple(sol) == expected
        assert is_fixed_point(system, sol)
    assert audit_monotonicity(system, samples=50, seed=seed) == []


def test_audit_flags_non_monotone_equation():
    L = Powerset([0, 1])
    system = EquationalSystem([Equation("u", MU, L, lambda ls: frozenset({0, 1}) - ls[0])])
    assert audit_monotonicity(system, samples=50) == [0]
