"""Fractional 2-matchings and their support structure.

The fractional 2-matching LP keeps only the degree equalities and the
[0, 1] bounds.  Its vertex solutions are half-integral, and their
support decomposes into *integer components* (cycles with value 1) and
*fractional components* (odd cycles with value 1/2 connected by chains
of value-1 edges).  The decomposition below recovers that structure
explicitly: half-cycles, maximal paths with their endpoints, and the
paths whose removal disconnects their component (cut paths).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantError, PreconditionError
from .graphs import MultiGraph
from .instances import MetricInstance
from .lp import LinearProgram, solve_lp
from .rational import Rat, ZERO, rat_to_pair

HALF = Rat(1, 2)
ONE = Rat(1)

EdgeKey = tuple[int, int]


@dataclass(frozen=True)
class FractionalTwoMatching:
    """An optimal vertex of the degree-2 LP: support values in {1/2, 1}."""

    n: int
    values: dict[EdgeKey, Rat]      # support edges only, keys (i, j) with i < j
    objective: Rat

    def value(self, i: int, j: int) -> Rat:
        return self.values.get((min(i, j), max(i, j)), ZERO)

    def degree(self, v: int) -> Rat:
        return sum((x for (i, j), x in self.values.items() if v in (i, j)),
                   ZERO)


def solve_f2m(inst: MetricInstance) -> FractionalTwoMatching:
    """Solve the degree-2 LP exactly and check half-integrality.

    Raises:
        InvariantError: If the LP returns a non-half-integral vertex
            (impossible for this constraint system unless the solver is
            broken) or a degree constraint is violated.
    """
    if inst.n < 3:
        raise PreconditionError("need at least 3 vertices")
    lp = LinearProgram()
    keys: list[EdgeKey] = []
    for i, j, cost in inst.edges():
        lp.add_variable(ZERO, ONE, name=f"x_{i}_{j}")
        keys.append((i, j))
    for v in range(inst.n):
        coeffs = {idx: ONE for idx, (i, j) in enumerate(keys) if v in (i, j)}
        lp.add_constraint(coeffs, "=", Rat(2))
    lp.set_objective({idx: inst.cost(i, j)
                      for idx, (i, j) in enumerate(keys)})
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise InvariantError(f"degree LP reported {sol.status} on a "
                             "complete instance")
    values: dict[EdgeKey, Rat] = {}
    for idx, key in enumerate(keys):
        x = sol.values[idx]
        if x == 0:
            continue
        if x not in (HALF, ONE):
            raise InvariantError(f"non-half-integral value {x} on {key}")
        values[key] = x
    result = FractionalTwoMatching(inst.n, values, sol.objective_value)
    for v in range(inst.n):
        if result.degree(v) != 2:
            raise InvariantError(f"degree {result.degree(v)} != 2 at {v}")
    return result


# -- support structure decomposition -------------------------------------------

@dataclass(frozen=True)
class HalfCycle:
    """An odd cycle of value-1/2 edges inside a fractional component."""

    vertices: tuple[int, ...]       # in cycle order
    edges: tuple[EdgeKey, ...]
    cost: Rat


@dataclass(frozen=True)
class PathChain:
    """A maximal chain of value-1 edges joining two half-cycle vertices.

    The endpoints may lie on the same half-cycle.  ``is_cut`` is true
    when removing the chain disconnects its component; all of its edges
    are then cut edges.
    """

    id: int
    endpoints: tuple[int, int]
    vertices: tuple[int, ...]       # endpoint, interiors..., endpoint
    edges: tuple[EdgeKey, ...]
    cost: Rat
    is_cut: bool


@dataclass(frozen=True)
class IntegerComponent:
    vertices: tuple[int, ...]       # in cycle order
    edges: tuple[EdgeKey, ...]
    cost: Rat


@dataclass(frozen=True)
class FractionalComponent:
    vertices: tuple[int, ...]
    cycles: tuple[HalfCycle, ...]
    paths: tuple[PathChain, ...]

    @property
    def cycle_cost(self) -> Rat:
        return sum((c.cost for c in self.cycles), ZERO)

    @property
    def path_cost(self) -> Rat:
        return sum((p.cost for p in self.paths), ZERO)

    def cut_paths(self) -> tuple[PathChain, ...]:
        return tuple(p for p in self.paths if p.is_cut)


@dataclass(frozen=True)
class F2MDecomposition:
    n: int
    integer_components: tuple[IntegerComponent, ...]
    fractional_components: tuple[FractionalComponent, ...]

    def total_cost(self) -> Rat:
        total = sum((c.cost for c in self.integer_components), ZERO)
        for comp in self.fractional_components:
            total += comp.path_cost + comp.cycle_cost / 2
        return total


def has_cut_edge(decomposition: F2MDecomposition) -> bool:
    """True iff some fractional component contains a cut path."""
    return any(comp.cut_paths()
               for comp in decomposition.fractional_components)


def _extract_cycle(start: int, adjacency: dict[int, list[int]]) -> list[int]:
    cycle = [start]
    prev = None
    current = start
    while True:
        nbrs = adjacency[current]
        nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
        if nxt == start:
            return cycle
        cycle.append(nxt)
        prev, current = current, nxt


def decompose(x: FractionalTwoMatching, inst: MetricInstance) -> F2MDecomposition:
    """Split the support into integer and fractional components.

    Raises:
        InvariantError: If the support violates the expected structure
            (even half-cycle, wrong vertex degrees, dangling chain); the
            message names a witness vertex.
    """
    support = MultiGraph(range(x.n),
                         [(i, j, inst.cost(i, j)) for (i, j) in sorted(x.values)])
    edge_value = {}
    for edge in support.edges:
        edge_value[edge.id] = x.values[(edge.u, edge.v)]

    bridge_ids = set(support.bridges())
    integer_components: list[IntegerComponent] = []
    fractional_components: list[FractionalComponent] = []

    for component in support.connected_components():
        comp = sorted(component)
        half_adj: dict[int, list[int]] = {v: [] for v in comp}
        unit_adj: dict[int, list[int]] = {v: [] for v in comp}
        comp_edges = []
        for v in comp:
            for edge in support.incident_edges(v):
                if edge.u != v:
                    continue
                comp_edges.append(edge)
                if edge_value[edge.id] == HALF:
                    half_adj[edge.u].append(edge.v)
                    half_adj[edge.v].append(edge.u)
                else:
                    unit_adj[edge.u].append(edge.v)
                    unit_adj[edge.v].append(edge.u)
        for v in comp:
            half_adj[v].sort()
            unit_adj[v].sort()

        if all(edge_value[e.id] == ONE for e in comp_edges):
            for v in comp:
                if len(unit_adj[v]) != 2:
                    raise InvariantError(f"integer component vertex {v} has "
                                         f"degree {len(unit_adj[v])}")
            cycle = _extract_cycle(comp[0], unit_adj)
            if len(cycle) != len(comp) or len(cycle) < 3:
                raise InvariantError(f"integer component at {comp[0]} is not "
                                     "a single cycle")
            edges = tuple((min(a, b), max(a, b))
                          for a, b in zip(cycle, cycle[1:] + cycle[:1]))
            cost = sum((inst.cost(a, b) for a, b in edges), ZERO)
            integer_components.append(IntegerComponent(tuple(cycle), edges,
                                                       cost))
            continue

        # Fractional component: classify vertices.
        cycle_vertices = []
        for v in comp:
            nh, nu = len(half_adj[v]), len(unit_adj[v])
            if (nh, nu) == (2, 1):
                cycle_vertices.append(v)
            elif (nh, nu) != (0, 2):
                raise InvariantError(
                    f"vertex {v} has {nh} half edges and {nu} unit edges; "
                    "not a valid fractional-component vertex")

        # Half edges decompose into odd cycles.
        cycles = []
        seen: set[int] = set()
        for v in cycle_vertices:
            if v in seen:
                continue
            cycle = _extract_cycle(v, half_adj)
            seen.update(cycle)
            if len(cycle) % 2 == 0:
                raise InvariantError(f"even half-cycle through vertex {v}")
            edges = tuple((min(a, b), max(a, b))
                          for a, b in zip(cycle, cycle[1:] + cycle[:1]))
            cost = sum((inst.cost(a, b) for a, b in edges), ZERO)
            cycles.append(HalfCycle(tuple(cycle), edges, cost))

        # Maximal unit-edge chains between cycle vertices.
        paths = []
        used: set[EdgeKey] = set()
        cycle_set = set(cycle_vertices)
        for v in sorted(cycle_set):
            for first in unit_adj[v]:
                key = (min(v, first), max(v, first))
                if key in used:
                    continue
                chain = [v, first]
                used.add(key)
                prev, current = v, first
                while current not in cycle_set:
                    nbrs = unit_adj[current]
                    if len(nbrs) != 2:
                        raise InvariantError(f"dangling chain at {current}")
                    nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
                    used.add((min(current, nxt), max(current, nxt)))
                    chain.append(nxt)
                    prev, current = current, nxt
                edges = tuple((min(a, b), max(a, b))
                              for a, b in zip(chain, chain[1:]))
                cost = sum((inst.cost(a, b) for a, b in edges), ZERO)
                first_key = edges[0]
                first_edge = next(e for e in comp_edges
                                  if (e.u, e.v) == first_key)
                is_cut = first_edge.id in bridge_ids
                # A chain is a cut path exactly when its edges are bridges;
                # the structure forces all-or-none, which we verify.
                for a, b in edges:
                    eid = next(e.id for e in comp_edges if (e.u, e.v) == (a, b))
                    if (eid in bridge_ids) != is_cut:
                        raise InvariantError(
                            f"chain through {chain[0]}..{chain[-1]} mixes "
                            "bridge and non-bridge edges")
                paths.append(PathChain(len(paths), (chain[0], chain[-1]),
                                       tuple(chain), edges, cost, is_cut))
        fractional_components.append(
            FractionalComponent(tuple(comp), tuple(cycles), tuple(paths)))

    decomposition = F2MDecomposition(x.n, tuple(integer_components),
                                     tuple(fractional_components))
    if decomposition.total_cost() != sum(
            (inst.cost(i, j) * v for (i, j), v in x.values.items()), ZERO):
        raise InvariantError("decomposition cost accounting mismatch")
    return decomposition


def f2m_values_from_decomposition(d: F2MDecomposition) -> dict[EdgeKey, Rat]:
    """Rebuild the edge-value map; inverse of ``decompose`` on its image."""
    values: dict[EdgeKey, Rat] = {}
    for comp in d.integer_components:
        for key in comp.edges:
            values[key] = ONE
    for comp in d.fractional_components:
        for cycle in comp.cycles:
            for key in cycle.edges:
                values[key] = HALF
        for path in comp.paths:
            for key in path.edges:
                values[key] = ONE
    return values


def f2m_to_json_dict(x: FractionalTwoMatching) -> dict:
    """JSON-ready form of a fractional 2-matching (exact value pairs)."""
    return {
        "n": x.n,
        "objective": rat_to_pair(x.objective),
        "values": [[i, j, rat_to_pair(v)]
                   for (i, j), v in sorted(x.values.items())],
    }


def decomposition_to_json_dict(d: F2MDecomposition) -> dict:
    """JSON-ready summary of the support structure."""
    return {
        "integer_components": [
            {"vertices": list(c.vertices), "cost": rat_to_pair(c.cost)}
            for c in d.integer_components],
        "fractional_components": [
            {
                "vertices": list(c.vertices),
                "cycles": [{"vertices": list(cy.vertices),
                            "cost": rat_to_pair(cy.cost)}
                           for cy in c.cycles],
                "paths": [{"vertices": list(p.vertices),
                           "cost": rat_to_pair(p.cost),
                           "is_cut": p.is_cut}
                          for p in c.paths],
            }
            for c in d.fractional_components],
    }
