"""Randomized structural campaign over hand-built fractional supports.

Random odd cycles are paired up by paths of random lengths (including
paths between vertices of the same cycle and between adjacent cycle
vertices), costs are drawn at random and completed by metric closure,
and the injected fractional 2-matching is pushed through every
construction.  The cost bounds hold for *any* feasible fractional
2-matching, so none of this requires optimality.
"""

import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from matchgap.f2m import FractionalTwoMatching, decompose, has_cut_edge
from matchgap.g2m import g2m_cost, two_matching_cost, validate_g2m
from matchgap.instances import make_instance
from matchgap.pipeline import BOUND_43, BOUND_109, run_g2m43, run_g2m109
from matchgap.twomo import g2m_from_subtour


def random_structure(seed: int):
    """A random valid fractional 2-matching support with metric costs."""
    rng = random.Random(seed)
    cycles = []
    vertex = 0
    for _ in range(rng.choice([2, 2, 2, 4])):
        size = rng.choice([3, 3, 5, 7])
        cycles.append(list(range(vertex, vertex + size)))
        vertex += size
    cycle_edges = set()
    adjacency = set()
    for cycle in cycles:
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            cycle_edges.add((min(a, b), max(a, b)))
            adjacency.add((min(a, b), max(a, b)))
    endpoints = [v for cycle in cycles for v in cycle]
    rng.shuffle(endpoints)
    values = {key: F(1, 2) for key in cycle_edges}
    used = set(cycle_edges)
    for a, b in zip(endpoints[::2], endpoints[1::2]):
        length = rng.choice([1, 1, 2, 3, 4])
        key = (min(a, b), max(a, b))
        if length == 1 and key in used:
            length = 2
        used.add(key)
        chain = [a] + [vertex + k for k in range(length - 1)] + [b]
        vertex += length - 1
        for u, w in zip(chain, chain[1:]):
            values[(min(u, w), max(u, w))] = F(1)
    n = vertex

    base = {key: F(rng.randint(2, 9), rng.randint(1, 3)) for key in values}
    dist = [[None] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = F(0)
    big = sum(base.values()) + 1
    for i, j in combinations(range(n), 2):
        dist[i][j] = dist[j][i] = base.get((i, j), big)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[j][i] = dist[i][k] + dist[k][j]
    inst = make_instance(n, lambda i, j: dist[i][j])
    objective = sum(inst.cost(i, j) * x for (i, j), x in values.items())
    return inst, FractionalTwoMatching(n, values, objective)


@pytest.mark.parametrize("seed", range(40))
def test_random_structures_through_all_constructions(seed):
    inst, x = random_structure(seed)
    for v in range(x.n):
        assert x.degree(v) == 2
    decomposition = decompose(x, inst)
    run43 = run_g2m43(inst, x)
    assert run43.within_bound
    assert validate_g2m(run43.g2m) is None
    assert g2m_cost(run43.g2m, inst) <= BOUND_43 * x.objective
    assert (two_matching_cost(run43.two_matching, inst)
            <= g2m_cost(run43.g2m, inst))
    run109 = run_g2m109(inst, x)
    if has_cut_edge(decomposition):
        assert not run109.applicable
    else:
        assert run109.applicable
        assert run109.g2m_cost_value <= BOUND_109 * x.objective


@pytest.mark.parametrize("seed", range(8))
def test_random_structures_end_to_end(seed):
    # First structure at or after the base seed small enough to keep the
    # subtour pipeline quick.
    for candidate in range(100 + 40 * seed, 140 + 40 * seed):
        inst, _ = random_structure(candidate)
        if inst.n <= 14:
            break
    else:
        pytest.fail("no small structure found in the seed window")
    run = g2m_from_subtour(inst)
    assert run.g2m_within_bound and run.two_matching_within_bound
