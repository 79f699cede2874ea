import random
from fractions import Fraction as F

import pytest

from matchgap.f2m import solve_f2m
from matchgap.instances import (gen_random_metric, gen_worst_case_family,
                                make_instance)
from matchgap.subtour import (separate_min_cut, solve_subtour_lp,
                              stoer_wagner_min_cut, verify_subtour_feasible)

from helpers import exhaustive_min_cut, full_subtour_objective


def test_triangle_forced_value():
    inst = make_instance(3, lambda i, j: F(1))
    sol = solve_subtour_lp(inst)
    assert sol.objective == 3
    assert sol.cut_pool == ()


def test_family_certificate_is_optimal():
    fam = gen_worst_case_family(1)
    sol = solve_subtour_lp(fam.instance)
    assert sol.objective == 6 == fam.f2m_cost()
    assert verify_subtour_feasible(fam.instance, fam.f2m_values) is None
    assert verify_subtour_feasible(fam.instance, sol.values) is None


def test_two_disjoint_triangles_separated():
    support = {(0, 1): F(1), (1, 2): F(1), (0, 2): F(1),
               (3, 4): F(1), (4, 5): F(1), (3, 5): F(1)}
    cut, value = separate_min_cut(6, support)
    assert value == 0
    assert cut in (frozenset({3, 4, 5}), frozenset({0, 1, 2}))
    assert 0 not in cut


def test_hamiltonian_cycle_not_violated():
    values = {(i, (i + 1) % 6): F(1) for i in range(6)}
    values = {(min(i, j), max(i, j)): v for (i, j), v in values.items()}
    cut, value = separate_min_cut(6, values)
    assert value == 2


@pytest.mark.parametrize("seed", range(25))
def test_stoer_wagner_matches_exhaustive(seed):
    rng = random.Random(seed)
    n = rng.randrange(3, 10)
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.7:
                weights[(i, j)] = F(rng.randint(0, 12), rng.randint(1, 4))
    # Ensure connectivity by chaining.
    for i in range(n - 1):
        weights.setdefault((i, i + 1), F(1, 3))
    cut, value = stoer_wagner_min_cut(list(range(n)), weights)
    _, expected = exhaustive_min_cut(list(range(n)), weights)
    assert value == expected
    actual = sum((w for (i, j), w in weights.items()
                  if (i in cut) != (j in cut)), F(0))
    assert actual == value


def test_verify_subtour_feasible_finds_violations():
    support = {(0, 1): F(1), (1, 2): F(1), (0, 2): F(1),
               (3, 4): F(1), (4, 5): F(1), (3, 5): F(1)}
    inst = make_instance(6, lambda i, j: F(1))
    witness = verify_subtour_feasible(inst, support)
    assert witness in (frozenset({0, 1, 2}), frozenset({3, 4, 5}))
    bad_degree = dict(support)
    del bad_degree[(0, 1)]
    assert "degree" in verify_subtour_feasible(inst, bad_degree)


@pytest.mark.parametrize("seed", range(12))
def test_cutting_plane_matches_full_enumeration(seed):
    n = 5 + seed % 4
    inst = gen_random_metric(n, 7000 + seed)
    sol = solve_subtour_lp(inst)
    assert sol.objective == full_subtour_objective(inst)
    assert verify_subtour_feasible(inst, sol.values) is None
    for cut in sol.cut_pool:
        assert 3 <= len(cut) <= n - 3


@pytest.mark.parametrize("seed", range(8))
def test_subtour_dominates_f2m(seed):
    inst = gen_random_metric(5 + seed % 5, 8100 + seed)
    assert solve_subtour_lp(inst).objective >= solve_f2m(inst).objective


def test_deterministic_resolve():
    inst = gen_random_metric(7, 123)
    a = solve_subtour_lp(inst)
    b = solve_subtour_lp(inst)
    assert a == b


@pytest.mark.parametrize("seed", range(10))
def test_objective_monotone_across_cutting_rounds(seed):
    inst = gen_random_metric(6 + seed % 4, 9900 + seed)
    sol = solve_subtour_lp(inst)
    trace = sol.objective_trace
    assert trace[-1] == sol.objective
    assert all(a <= b for a, b in zip(trace, trace[1:]))
    assert len(trace) == len(sol.cut_pool) + 1
