"""2-matchings with optional nodes (2MO), and their matching reduction.

The split construction doubles every vertex of an instance into a
mandatory node (degree exactly 2) and an optional node (degree 0 or 2)
and triples every edge; summing the three copies of an edge in an
integral 2MO solution yields a graphical 2-matching.  The polytope of
integral 2MO solutions is cut out by degree constraints, bounds, and
the odd-matching constraints

    y(delta(S) \\ F) + sum_{e in F} (1 - y(e)) >= 1
        for all S, all odd matchings F inside delta(S),

which the checker verifies by enumeration over S with an exact
branch-and-bound over odd matchings (safe pruning only: a partial
matching is abandoned only when even taking every remaining
negative-weight edge could not beat the incumbent).

Scaling a subtour-feasible point by (1 - a, a, a) across the three edge
copies lands inside this polytope for a = 1/9, which is what makes the
end-to-end pipeline work: reduce the split instance to a perfect
matching problem, solve exactly, decode, and the result is a graphical
2-matching of cost at most (1 + a) times the subtour optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvariantError, PreconditionError
from .g2m import (GraphicalTwoMatching, TwoMatching, shortcut,
                  two_matching_cost, validate_g2m, validate_two_matching)
from .graphs import MultiGraph
from .instances import MetricInstance
from .matching import PerfectMatching, min_cost_perfect_matching
from .rational import Rat, ZERO
from .subtour import SubtourSolution, solve_subtour_lp

NodeId = tuple
TwoMOEdge = tuple     # canonical (u, v) with u < v
ALPHA_DEFAULT = Rat(1, 9)


@dataclass(frozen=True)
class TwoMOInstance:
    """Mandatory/optional node sets with a costed edge list."""

    mandatory: tuple
    optional: tuple
    edges: tuple[tuple[NodeId, NodeId, Rat], ...]

    def nodes(self) -> tuple:
        return self.mandatory + self.optional

    def edge_cost(self, key: TwoMOEdge) -> Rat:
        return self._cost_map()[key]

    def _cost_map(self) -> dict[TwoMOEdge, Rat]:
        cached = getattr(self, "_costs", None)
        if cached is None:
            cached = {(u, v): c for u, v, c in self.edges}
            object.__setattr__(self, "_costs", cached)
        return cached


def mandatory_node(i: int) -> NodeId:
    return ("m", i)


def optional_node(i: int) -> NodeId:
    return ("o", i)


def _canonical(u: NodeId, v: NodeId) -> TwoMOEdge:
    return (u, v) if u < v else (v, u)


def split_graph(inst: MetricInstance,
                support: Iterable[tuple[int, int]] | None = None,
                ) -> TwoMOInstance:
    """The split 2MO instance of a metric instance.

    Every vertex ``i`` becomes a mandatory node and an optional node;
    every original edge ``(i, j)`` becomes the three copies
    ``(i_m, j_m)``, ``(i_m, j_o)``, ``(i_o, j_m)``, each at the original
    cost.  No edge ever joins two optional nodes.  ``support`` restricts
    the original edge set (default: all pairs).
    """
    pairs = (sorted((min(i, j), max(i, j)) for i, j in support)
             if support is not None
             else [(i, j) for i, j, _ in inst.edges()])
    edges = []
    for i, j in pairs:
        c = inst.cost(i, j)
        edges.append((*_canonical(mandatory_node(i), mandatory_node(j)), c))
        edges.append((*_canonical(mandatory_node(i), optional_node(j)), c))
        edges.append((*_canonical(optional_node(i), mandatory_node(j)), c))
    for u, v, _ in edges:
        if u[0] == "o" and v[0] == "o":
            raise InvariantError("split construction produced an "
                                 "optional-optional edge")
    mandatory = tuple(mandatory_node(i) for i in range(inst.n))
    optional = tuple(optional_node(i) for i in range(inst.n))
    return TwoMOInstance(mandatory, optional, tuple(edges))


def map_subtour_to_2mo(values: dict[tuple[int, int], Rat],
                       alpha: Rat = ALPHA_DEFAULT) -> dict[TwoMOEdge, Rat]:
    """Spread an edge map over the three split copies.

    ``(i_m, j_m)`` gets ``(1 - alpha) x``; the two mixed copies get
    ``alpha x`` each, so the total cost scales by exactly ``1 + alpha``.
    """
    point: dict[TwoMOEdge, Rat] = {}
    for (i, j), x in values.items():
        if x == 0:
            continue
        point[_canonical(mandatory_node(i), mandatory_node(j))] = (1 - alpha) * x
        point[_canonical(mandatory_node(i), optional_node(j))] = alpha * x
        point[_canonical(optional_node(i), mandatory_node(j))] = alpha * x
    return point


def point_cost(tmi: TwoMOInstance, point: dict[TwoMOEdge, Rat]) -> Rat:
    return sum((point.get((u, v), ZERO) * c for u, v, c in tmi.edges), ZERO)


# -- polytope membership -------------------------------------------------------

@dataclass(frozen=True)
class TwoMOViolation:
    kind: str                 # 'degree' | 'bounds' | 'odd_matching'
    node_set: frozenset | None
    matching: tuple[TwoMOEdge, ...] | None
    lhs: Rat

    def __str__(self) -> str:
        if self.kind == "odd_matching":
            return (f"odd-matching constraint violated: S={set(self.node_set)}, "
                    f"F={list(self.matching)}, lhs={self.lhs}")
        return f"{self.kind} violated ({self.node_set}): {self.lhs}"


def _min_odd_matching(edges: list[tuple[TwoMOEdge, Rat]]
                      ) -> tuple[Rat, tuple[TwoMOEdge, ...]] | None:
    """Minimum total weight of an odd-size matching among ``edges``.

    Exact branch and bound: edges in ascending weight order; a branch is
    cut only when its weight plus the sum of all remaining negative
    weights cannot beat the incumbent, which can never discard a true
    minimum.
    """
    items = sorted(edges, key=lambda kv: (kv[1], kv[0]))
    m = len(items)
    neg_suffix = [ZERO] * (m + 1)
    for idx in range(m - 1, -1, -1):
        w = items[idx][1]
        neg_suffix[idx] = neg_suffix[idx + 1] + (w if w < 0 else ZERO)
    best: list[tuple[Rat, tuple[TwoMOEdge, ...]] | None] = [None]

    def recurse(idx: int, used: set, count: int, weight: Rat,
                chosen: list[TwoMOEdge]) -> None:
        if count % 2 == 1:
            if best[0] is None or weight < best[0][0]:
                best[0] = (weight, tuple(chosen))
        if idx == m:
            return
        if best[0] is not None and weight + neg_suffix[idx] >= best[0][0]:
            return
        key, w = items[idx]
        u, v = key
        if u not in used and v not in used:
            used.add(u)
            used.add(v)
            chosen.append(key)
            recurse(idx + 1, used, count + 1, weight + w, chosen)
            chosen.pop()
            used.discard(u)
            used.discard(v)
        recurse(idx + 1, used, count, weight, chosen)

    recurse(0, set(), 0, ZERO, [])
    return best[0]


def check_2mo_polytope(tmi: TwoMOInstance, point: dict[TwoMOEdge, Rat],
                       max_vertices: int = 12) -> TwoMOViolation | None:
    """Verify membership in the 2MO polytope by enumeration.

    Checks bounds and degree constraints directly, then every node set S
    against its worst odd matching F inside delta(S).  Returns the first
    violation or None.
    """
    nodes = tmi.nodes()
    if len(nodes) > max_vertices:
        raise PreconditionError(
            f"2MO enumeration limited to {max_vertices} nodes, "
            f"got {len(nodes)}")
    mandatory = set(tmi.mandatory)
    for u, v, _ in tmi.edges:
        y = point.get((u, v), ZERO)
        if y < 0 or y > 1:
            return TwoMOViolation("bounds", frozenset((u, v)), None, y)
    incident: dict[NodeId, list[TwoMOEdge]] = {v: [] for v in nodes}
    for u, v, _ in tmi.edges:
        incident[u].append((u, v))
        incident[v].append((u, v))
    for v in nodes:
        degree = sum((point.get(key, ZERO) for key in incident[v]), ZERO)
        if (v in mandatory and degree != 2) or degree > 2:
            return TwoMOViolation("degree", frozenset((v,)), None, degree)

    position = {v: k for k, v in enumerate(nodes)}
    n = len(nodes)
    one = Rat(1)
    for mask in range(1, 1 << (n - 1)):
        # Node `nodes[n-1]` stays outside S: S and its complement induce
        # the same constraint family.
        members = [nodes[k] for k in range(n - 1) if mask & (1 << k)]
        s = set(members)
        crossing = []
        base = ZERO
        for u, v, _ in tmi.edges:
            if (u in s) != (v in s):
                y = point.get((u, v), ZERO)
                base += y
                crossing.append(((u, v), one - 2 * y))
        if not crossing:
            continue
        result = _min_odd_matching(crossing)
        if result is None:
            continue
        weight, chosen = result
        if base + weight < one:
            return TwoMOViolation("odd_matching", frozenset(s), chosen,
                                  base + weight)
    return None


def is_integral_solution(tmi: TwoMOInstance,
                         chosen: frozenset[TwoMOEdge]) -> str | None:
    """None if ``chosen`` is a valid integral 2MO solution."""
    degree: dict[NodeId, int] = {v: 0 for v in tmi.nodes()}
    keys = {(u, v) for u, v, _ in tmi.edges}
    for key in chosen:
        if key not in keys:
            return f"unknown edge {key}"
        degree[key[0]] += 1
        degree[key[1]] += 1
    for v in tmi.mandatory:
        if degree[v] != 2:
            return f"mandatory node {v} has degree {degree[v]}"
    for v in tmi.optional:
        if degree[v] not in (0, 2):
            return f"optional node {v} has degree {degree[v]}"
    return None


def solution_cost(tmi: TwoMOInstance, chosen: frozenset[TwoMOEdge]) -> Rat:
    costs = {(u, v): c for u, v, c in tmi.edges}
    return sum((costs[key] for key in chosen), ZERO)


# -- reduction to perfect matching ---------------------------------------------

@dataclass(frozen=True)
class MatchingReduction:
    """The gadget expansion of a 2MO instance into a matching instance.

    Each node ``v`` becomes ``v'`` and ``v''``; each 2MO edge grows two
    port vertices joined to both copies of their endpoint at half the
    edge cost, plus a free center edge between the ports.  Optional
    nodes get a free edge between their two copies.  A perfect
    matching's cost then equals the induced 2MO solution's cost with no
    offset: an edge is selected exactly when its center edge is *not*
    matched, in which case the matching pays both its half-cost stubs.
    """

    instance: TwoMOInstance
    graph: MultiGraph
    center_edge: dict[TwoMOEdge, int]
    stub_edges: dict[tuple[TwoMOEdge, NodeId], tuple[int, int]]
    skip_edge: dict[NodeId, int]


def _copy_a(v: NodeId) -> tuple:
    return ("a",) + tuple(v) if isinstance(v, tuple) else ("a", v)


def _copy_b(v: NodeId) -> tuple:
    return ("b",) + tuple(v) if isinstance(v, tuple) else ("b", v)


def _port(key: TwoMOEdge, v: NodeId) -> tuple:
    return ("port", key, v)


def reduce_2mo_to_matching(tmi: TwoMOInstance) -> MatchingReduction:
    """Build the matching instance whose perfect matchings encode
    integral 2MO solutions, costs matching exactly."""
    vertices: list = []
    for v in tmi.nodes():
        vertices.append(_copy_a(v))
        vertices.append(_copy_b(v))
    edges: list[tuple] = []
    center_edge: dict[TwoMOEdge, int] = {}
    stub_edges: dict[tuple[TwoMOEdge, NodeId], tuple[int, int]] = {}
    skip_edge: dict[NodeId, int] = {}
    for u, v, cost in tmi.edges:
        key = (u, v)
        pu, pv = _port(key, u), _port(key, v)
        vertices.append(pu)
        vertices.append(pv)
        half = cost / 2
        base = len(edges)
        edges.append((_copy_a(u), pu, half))
        edges.append((_copy_b(u), pu, half))
        edges.append((pu, pv, ZERO))
        edges.append((_copy_a(v), pv, half))
        edges.append((_copy_b(v), pv, half))
        stub_edges[(key, u)] = (base, base + 1)
        center_edge[key] = base + 2
        stub_edges[(key, v)] = (base + 3, base + 4)
    for v in tmi.optional:
        skip_edge[v] = len(edges)
        edges.append((_copy_a(v), _copy_b(v), ZERO))
    graph = MultiGraph(vertices, edges)
    return MatchingReduction(tmi, graph, center_edge, stub_edges, skip_edge)


def decode_matching_to_2mo(reduction: MatchingReduction,
                           matching: PerfectMatching) -> frozenset[TwoMOEdge]:
    """Selected 2MO edges: those whose center edge the matching skips.

    Raises:
        InvariantError: If the induced solution violates a degree
            constraint or its cost disagrees with the matching cost
            (impossible for true perfect matchings).
    """
    chosen_ids = set(matching.edge_ids)
    selected = frozenset(key for key, eid in reduction.center_edge.items()
                         if eid not in chosen_ids)
    problem = is_integral_solution(reduction.instance, selected)
    if problem is not None:
        raise InvariantError(f"decoded 2MO solution invalid: {problem}")
    cost = solution_cost(reduction.instance, selected)
    if cost != matching.total_cost:
        raise InvariantError(f"decoded cost {cost} != matching cost "
                             f"{matching.total_cost}")
    return selected


def map_point_to_matching_polytope(reduction: MatchingReduction,
                                   point: dict[TwoMOEdge, Rat]
                                   ) -> dict[int, Rat]:
    """Image of a 2MO point inside the reduced matching LP.

    Stubs carry half the edge value, center edges the complement, and
    each optional node's skip edge absorbs its unused degree.
    """
    tmi = reduction.instance
    image: dict[int, Rat] = {}
    for u, v, _ in tmi.edges:
        key = (u, v)
        y = point.get(key, ZERO)
        for node in (u, v):
            for eid in reduction.stub_edges[(key, node)]:
                image[eid] = y / 2
        image[reduction.center_edge[key]] = 1 - y
    incident: dict[NodeId, Rat] = {v: ZERO for v in tmi.nodes()}
    for u, v, _ in tmi.edges:
        y = point.get((u, v), ZERO)
        incident[u] += y
        incident[v] += y
    for v in tmi.optional:
        image[reduction.skip_edge[v]] = 1 - incident[v] / 2
    return image


# -- back to graphical 2-matchings ---------------------------------------------

def _original_index(node: NodeId) -> int:
    return node[1]


def twomo_to_g2m(chosen: frozenset[TwoMOEdge], n: int) -> GraphicalTwoMatching:
    """Sum the three copies of each edge; trim triples to one copy.

    Trimming preserves degree parity and cannot raise the cost, so the
    result remains a graphical 2-matching, which is asserted.
    """
    mult: dict[tuple[int, int], int] = {}
    for u, v in chosen:
        i, j = sorted((_original_index(u), _original_index(v)))
        mult[(i, j)] = mult.get((i, j), 0) + 1
    for key, m in list(mult.items()):
        if m == 3:
            mult[key] = 1
        elif m > 3:
            raise InvariantError(f"edge {key} appears {m} > 3 times")
    g2m = GraphicalTwoMatching(tuple(range(n)), mult)
    violation = validate_g2m(g2m)
    if violation is not None:
        raise InvariantError(f"2MO solution does not induce a graphical "
                             f"2-matching: {violation}")
    return g2m


# -- exact optimal 2-matchings --------------------------------------------------

def optimal_two_matching(inst: MetricInstance,
                         edges: Sequence[tuple[int, int]] | None = None,
                         ) -> tuple[TwoMatching, Rat]:
    """Exact minimum-cost 2-matching via the matching reduction.

    All nodes mandatory, single copy per edge: perfect matchings of the
    reduced graph are exactly the 2-matchings of the instance.  The
    default edge set is the complete graph, which makes this an exact
    (if heavyweight) oracle for the optimal 2-matching.
    """
    pairs = (sorted((min(i, j), max(i, j)) for i, j in edges)
             if edges is not None else [(i, j) for i, j, _ in inst.edges()])
    tmi = TwoMOInstance(tuple(range(inst.n)), (),
                        tuple((i, j, inst.cost(i, j)) for i, j in pairs))
    reduction = reduce_2mo_to_matching(tmi)
    matching = min_cost_perfect_matching(reduction.graph)
    selected = decode_matching_to_2mo(reduction, matching)
    adjacency: dict[int, list[int]] = {v: [] for v in range(inst.n)}
    for i, j in selected:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen: set[int] = set()
    cycles = []
    for start in range(inst.n):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        prev, current = None, start
        while True:
            nbrs = adjacency[current]
            nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
            if nxt == start:
                break
            cycle.append(nxt)
            seen.add(nxt)
            prev, current = current, nxt
        cycles.append(tuple(cycle))
    result = TwoMatching(tuple(cycles))
    problem = validate_two_matching(result, inst.n)
    if problem is not None:
        raise InvariantError(f"decoded 2-matching invalid: {problem}")
    if two_matching_cost(result, inst) != matching.total_cost:
        raise InvariantError("2-matching cost disagrees with matching cost")
    return result, matching.total_cost


# -- the end-to-end pipeline -----------------------------------------------------

@dataclass(frozen=True)
class SubtourToG2MRun:
    """Everything an end-to-end run certifies, with exact values."""

    subtour: SubtourSolution
    alpha: Rat
    point_cost_value: Rat
    matching_cost: Rat
    solution: frozenset[TwoMOEdge]
    g2m: GraphicalTwoMatching
    g2m_cost: Rat
    two_matching: TwoMatching
    two_matching_cost_value: Rat

    @property
    def bound(self) -> Rat:
        return (1 + self.alpha) * self.subtour.objective

    @property
    def g2m_within_bound(self) -> bool:
        return self.g2m_cost <= self.bound

    @property
    def two_matching_within_bound(self) -> bool:
        return self.two_matching_cost_value <= self.bound


def g2m_from_subtour(inst: MetricInstance,
                     alpha: Rat = ALPHA_DEFAULT) -> SubtourToG2MRun:
    """Subtour optimum -> split instance -> matching -> graphical
    2-matching -> shortcut 2-matching, with exact cost certificates.

    The reduction is built on the support of the subtour optimum; the
    scaled point stays feasible there and every zero-value edge only
    inflates the matching instance.  At ``alpha = 1/9`` the decoded
    graphical 2-matching costs at most ``10/9`` times the subtour
    optimum (asserted exactly); other values of alpha are allowed for
    exploration and simply reported against their own bound.

    Raises:
        PreconditionError: On non-metric instances (the final shortcut
            needs the triangle inequality).
    """
    if not inst.metric:
        raise PreconditionError("pipeline requires a metric instance")
    sub = solve_subtour_lp(inst)
    tmi = split_graph(inst, support=sub.support())
    point = map_subtour_to_2mo(sub.values, alpha)
    expected_point_cost = (1 + alpha) * sub.objective
    actual_point_cost = point_cost(tmi, point)
    if actual_point_cost != expected_point_cost:
        raise InvariantError(f"point cost {actual_point_cost} != "
                             f"(1 + a) * subtour = {expected_point_cost}")
    reduction = reduce_2mo_to_matching(tmi)
    matching = min_cost_perfect_matching(reduction.graph)
    if alpha == ALPHA_DEFAULT and matching.total_cost > expected_point_cost:
        raise InvariantError(
            f"matching cost {matching.total_cost} exceeds the feasible "
            f"point cost {expected_point_cost}")
    selected = decode_matching_to_2mo(reduction, matching)
    g2m = twomo_to_g2m(selected, inst.n)
    g2m_cost_value = sum((inst.cost(i, j) * m
                          for (i, j), m in g2m.multiplicity.items()), ZERO)
    if g2m_cost_value > matching.total_cost:
        raise InvariantError("triple trimming increased the cost")
    tm = shortcut(g2m, inst)
    tm_cost = two_matching_cost(tm, inst)
    if tm_cost > g2m_cost_value:
        raise InvariantError(f"shortcut increased cost: {tm_cost} > "
                             f"{g2m_cost_value}")
    return SubtourToG2MRun(
        subtour=sub, alpha=alpha,
        point_cost_value=actual_point_cost,
        matching_cost=matching.total_cost,
        solution=selected, g2m=g2m, g2m_cost=g2m_cost_value,
        two_matching=tm, two_matching_cost_value=tm_cost)
