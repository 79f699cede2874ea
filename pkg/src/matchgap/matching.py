"""Exact minimum-cost perfect matching on multigraphs.

Costs may be negative (two of the auxiliary-graph constructions rely on
that).  All arithmetic is exact: rational costs are scaled to integers
by their common denominator, and the weighted matching itself runs on
(large) integers, for which the underlying algorithm is exact.

Tie-breaking is deterministic and canonical: among all minimum-cost
perfect matchings the solver returns the one whose sorted edge-id tuple
is lexicographically smallest.  This is achieved by perturbing the
integer weights with powers of two far below the cost scale, so it costs
nothing in exactness.  The brute-force oracle applies the same rule,
which lets tests compare full edge sets rather than just costs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .errors import (InvariantError, NoPerfectMatchingError,
                     PreconditionError)
from .graphs import MultiGraph, VertexId
from .rational import Rat, ZERO, common_denominator

BRUTE_FORCE_LIMIT = 12
ODD_SET_ENUMERATION_LIMIT = 16


@dataclass(frozen=True)
class PerfectMatching:
    """A perfect matching given by edge ids and its exact total cost."""

    edge_ids: tuple[int, ...]
    total_cost: Rat

    def covers(self, g: MultiGraph) -> bool:
        seen: set[VertexId] = set()
        for eid in self.edge_ids:
            edge = g.edge_by_id(eid)
            if edge.u in seen or edge.v in seen:
                return False
            seen.add(edge.u)
            seen.add(edge.v)
        return len(seen) == g.num_vertices


@dataclass(frozen=True)
class PolytopeViolation:
    """First violated constraint of the matching LP, with a witness."""

    kind: str                      # 'nonnegativity' | 'degree' | 'odd_set'
    witness: tuple
    lhs: Rat
    rhs: Rat

    def __str__(self) -> str:
        return (f"{self.kind} violated at {self.witness}: "
                f"{self.lhs} vs {self.rhs}")


def _odd_components(g: MultiGraph, removed: frozenset) -> int:
    seen: set[VertexId] = set(removed)
    count = 0
    for start in g.vertices:
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        size = 0
        while stack:
            v = stack.pop()
            size += 1
            for edge in g.incident_edges(v):
                w = edge.other(v)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if size % 2 == 1:
            count += 1
    return count


def tutte_witness(g: MultiGraph) -> frozenset | None:
    """A vertex set S with more than |S| odd components of g - S.

    Exists whenever the graph has no perfect matching; found by
    enumeration, so only attempted on small graphs.
    """
    if g.num_vertices > ODD_SET_ENUMERATION_LIMIT:
        return None
    for size in range(g.num_vertices + 1):
        for subset in combinations(g.vertices, size):
            removed = frozenset(subset)
            if _odd_components(g, removed) > size:
                return removed
    return None


def _no_matching_error(g: MultiGraph) -> NoPerfectMatchingError:
    witness = tutte_witness(g)
    if witness is None:
        return NoPerfectMatchingError(
            "graph admits no perfect matching (search failure witness; "
            "graph too large for Tutte-set extraction)")
    return NoPerfectMatchingError(
        f"graph admits no perfect matching; deleting {sorted(map(repr, witness))} "
        f"leaves {_odd_components(g, witness)} odd components", witness)


def min_cost_perfect_matching(g: MultiGraph) -> PerfectMatching:
    """Exact minimum-cost perfect matching; canonical tie-break.

    Parallel edges are reduced to their cheapest representative (lowest
    edge id on cost ties) before solving; a minimum-cost matching never
    needs the others.

    Raises:
        NoPerfectMatchingError: With a Tutte-set witness when extractable.
    """
    n = g.num_vertices
    if n == 0:
        return PerfectMatching((), ZERO)
    if n % 2 == 1:
        raise _no_matching_error(g)

    best: dict[tuple[VertexId, VertexId], tuple[Rat, int]] = {}
    for edge in g.edges:
        key = (edge.u, edge.v) if repr(edge.u) <= repr(edge.v) else (edge.v, edge.u)
        cur = best.get(key)
        if cur is None or (edge.cost, edge.id) < cur:
            best[key] = (edge.cost, edge.id)
    if not best:
        raise _no_matching_error(g)

    reps = sorted(best.values(), key=lambda item: item[1])
    scale = common_denominator([cost for cost, _ in reps])
    m = len(reps)
    # Weight = -cost (maximize) on a scale that dominates the
    # lexicographic perturbation 2**(m - rank) by edge-id rank.
    weighted: list[tuple[int, int]] = []
    for rank, (cost, eid) in enumerate(reps):
        w = (-int(cost * scale)) * (1 << (m + 2)) + (1 << (m - rank))
        weighted.append((eid, w))
    lo = min(w for _, w in weighted)
    hi = max(w for _, w in weighted)
    offset = (hi - lo) * (n + 1) + 1 - lo
    graph = nx.Graph()
    graph.add_nodes_from(g.vertices)
    for eid, w in weighted:
        edge = g.edge_by_id(eid)
        # Doubling keeps every slack in the solver even, hence every
        # dual update integral.
        graph.add_edge(edge.u, edge.v, weight=2 * (w + offset), eid=eid)

    mate_pairs = nx.max_weight_matching(graph, maxcardinality=True)
    if 2 * len(mate_pairs) != n:
        raise _no_matching_error(g)
    edge_ids = sorted(graph[u][v]["eid"] for u, v in mate_pairs)
    total = sum((g.edge_by_id(eid).cost for eid in edge_ids), ZERO)
    matching = PerfectMatching(tuple(edge_ids), total)
    if not matching.covers(g):
        raise InvariantError("matching does not cover every vertex once")
    return matching


def brute_force_perfect_matching(g: MultiGraph) -> PerfectMatching:
    """Exhaustive-search oracle; same tie-break rule as the main solver.

    Raises:
        PreconditionError: On more than 12 vertices.
        NoPerfectMatchingError: When no perfect matching exists.
    """
    n = g.num_vertices
    if n > BRUTE_FORCE_LIMIT:
        raise PreconditionError(
            f"brute force limited to {BRUTE_FORCE_LIMIT} vertices, got {n}")
    if n % 2 == 1:
        raise _no_matching_error(g)
    order = list(g.vertices)
    position = {v: i for i, v in enumerate(order)}
    best: list[tuple[Rat, tuple[int, ...]] | None] = [None]

    def extend(covered: set[VertexId], chosen: list[int], cost: Rat) -> None:
        if len(covered) == n:
            key = (cost, tuple(sorted(chosen)))
            if best[0] is None or key < best[0]:
                best[0] = key
            return
        v = min((u for u in order if u not in covered), key=position.get)
        for edge in sorted(g.incident_edges(v), key=lambda e: e.id):
            w = edge.other(v)
            if w in covered:
                continue
            covered.add(v)
            covered.add(w)
            chosen.append(edge.id)
            extend(covered, chosen, cost + edge.cost)
            chosen.pop()
            covered.discard(v)
            covered.discard(w)

    extend(set(), [], ZERO)
    if best[0] is None:
        raise _no_matching_error(g)
    cost, ids = best[0]
    return PerfectMatching(ids, cost)


def check_matching_polytope_point(
        g: MultiGraph, x: dict[int, Rat],
        max_vertices: int = ODD_SET_ENUMERATION_LIMIT,
) -> PolytopeViolation | None:
    """Verify a point against the perfect-matching LP by enumeration.

    Checks nonnegativity, the degree equalities, and every odd-set
    constraint ``x(delta(S)) >= 1`` for odd ``|S| >= 3`` by full subset
    enumeration.  Returns the first violated constraint or None.

    ``max_vertices`` bounds the enumeration; raising it is the caller's
    explicit opt-in to a longer run.
    """
    n = g.num_vertices
    if n > max_vertices:
        raise PreconditionError(
            f"odd-set enumeration limited to {max_vertices} vertices, got {n}")
    one = Rat(1)
    for edge in g.edges:
        value = x.get(edge.id, ZERO)
        if value < 0:
            return PolytopeViolation("nonnegativity", (edge.id,), value, ZERO)
    for v in g.vertices:
        total = sum((x.get(e.id, ZERO) for e in g.incident_edges(v)), ZERO)
        if total != one:
            return PolytopeViolation("degree", (v,), total, one)

    # Scale values to integers so the subset scan runs on ints.
    values = [x.get(e.id, ZERO) for e in g.edges]
    scale = common_denominator(values)
    scaled = [int(v * scale) for v in values]
    order = list(g.vertices)
    position = {v: i for i, v in enumerate(order)}
    edge_info = [(1 << position[e.u], 1 << position[e.v], scaled[e.id], e.id)
                 for e in g.edges]
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if size % 2 == 0 or size < 3 or size > n - 1:
            continue
        total = 0
        for bit_u, bit_v, value, _eid in edge_info:
            if bool(mask & bit_u) != bool(mask & bit_v):
                total += value
        if total < scale:
            witness = frozenset(order[i] for i in range(n) if mask & (1 << i))
            return PolytopeViolation("odd_set", (witness,),
                                     Rat(total, scale), one)
    return None


def np_bound_check(g: MultiGraph) -> tuple[PerfectMatching, bool]:
    """Min-cost perfect matching on a cubic 2-edge-connected graph, and
    whether its cost is at most one third of the total edge cost.

    The bound holds for every rational cost assignment (the uniform
    one-third point is feasible for the matching LP on such graphs), so
    the returned flag is True unless something is deeply wrong.

    Raises:
        PreconditionError: If the graph is not cubic or not
            2-edge-connected, naming the offending vertex or bridge.
    """
    bad = g.non_cubic_vertex()
    if bad is not None:
        raise PreconditionError(
            f"graph is not cubic: vertex {bad!r} has degree {g.degree(bad)}")
    witness = g.two_edge_connectivity_witness()
    if witness is not None:
        raise PreconditionError(f"graph is not 2-edge-connected: {witness}")
    matching = min_cost_perfect_matching(g)
    bound_holds = 3 * matching.total_cost <= g.total_cost()
    return matching, bound_holds
