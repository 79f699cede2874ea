"""Graphical 2-matchings and plain 2-matchings.

A graphical 2-matching assigns each edge 0, 1 or 2 copies so that every
vertex has degree 2 or 4 and every connected component of the support
spans at least three vertices.  Under the triangle inequality such an
object can always be shortcut to a plain 2-matching (disjoint simple
cycles of length >= 3) of no greater cost.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .instances import MetricInstance
from .rational import Rat, ZERO

EdgeKey = tuple[int, int]


@dataclass(frozen=True)
class GraphicalTwoMatching:
    """Edge multiplicities (1 or 2; absent means 0) over a vertex set."""

    vertices: tuple[int, ...]
    multiplicity: dict[EdgeKey, int]

    def degree(self, v: int) -> int:
        return sum(m for (i, j), m in self.multiplicity.items()
                   if v in (i, j))


@dataclass(frozen=True)
class TwoMatching:
    """A disjoint union of simple cycles covering the vertex set."""

    cycles: tuple[tuple[int, ...], ...]

    def edges(self) -> list[EdgeKey]:
        result = []
        for cycle in self.cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                result.append((min(a, b), max(a, b)))
        return result


@dataclass(frozen=True)
class G2MViolation:
    kind: str          # 'multiplicity' | 'degree' | 'component'
    witness: tuple

    def __str__(self) -> str:
        return f"{self.kind} violated at {self.witness}"


def validate_g2m(g: GraphicalTwoMatching) -> G2MViolation | None:
    """Check multiplicities, degrees, and component sizes; None if valid."""
    vertex_set = set(g.vertices)
    adjacency: dict[int, list[int]] = {v: [] for v in g.vertices}
    for (i, j), m in g.multiplicity.items():
        if m not in (1, 2) or i >= j or i not in vertex_set or j not in vertex_set:
            return G2MViolation("multiplicity", (i, j, m))
        adjacency[i].append(j)
        adjacency[j].append(i)
    degree = {v: ZERO for v in g.vertices}
    for (i, j), m in g.multiplicity.items():
        degree[i] += m
        degree[j] += m
    for v in g.vertices:
        if degree[v] not in (2, 4):
            return G2MViolation("degree", (v, degree[v]))
    seen: set[int] = set()
    for start in g.vertices:
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        component = []
        while stack:
            v = stack.pop()
            component.append(v)
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(component) < 3:
            return G2MViolation("component", tuple(sorted(component)))
    return None


def g2m_cost(g: GraphicalTwoMatching, inst: MetricInstance) -> Rat:
    """Multiplicity-weighted exact cost."""
    return sum((inst.cost(i, j) * m for (i, j), m in g.multiplicity.items()),
               ZERO)


def two_matching_cost(t: TwoMatching, inst: MetricInstance) -> Rat:
    return sum((inst.cost(i, j) for i, j in t.edges()), ZERO)


def validate_two_matching(t: TwoMatching, n: int) -> str | None:
    """None if ``t`` is a disjoint cycle cover of range(n) with cycles >= 3."""
    seen: set[int] = set()
    for cycle in t.cycles:
        if len(cycle) < 3:
            return f"cycle {cycle} shorter than 3"
        for v in cycle:
            if v in seen:
                return f"vertex {v} appears twice"
            seen.add(v)
    if seen != set(range(n)):
        return f"cycles cover {len(seen)} of {n} vertices"
    return None


def g2m_to_json_dict(g: GraphicalTwoMatching) -> dict:
    """JSON-ready multiplicity list for certificate files."""
    return {"vertices": list(g.vertices),
            "multiplicities": [[i, j, m] for (i, j), m
                               in sorted(g.multiplicity.items())]}


def two_matching_to_json_dict(t: TwoMatching) -> dict:
    return {"cycles": [list(cycle) for cycle in t.cycles]}


def _euler_circuit(component: list[int],
                   multiplicity: dict[EdgeKey, int]) -> list[int]:
    """Hierholzer circuit over the multigraph restricted to ``component``.

    Deterministic: starts at the smallest vertex and always leaves along
    the smallest-numbered unused edge copy.
    """
    adjacency: dict[int, list[list]] = {v: [] for v in component}
    comp_set = set(component)
    for (i, j), m in multiplicity.items():
        if i not in comp_set:
            continue
        for copy in range(m):
            slot = [i, j, False]
            adjacency[i].append(slot)
            adjacency[j].append(slot)
    for v in component:
        adjacency[v].sort(key=lambda slot: (slot[0] + slot[1] - v, slot[0]))
    start = min(component)
    stack = [start]
    cursor = {v: 0 for v in component}
    trail: list[int] = []
    while stack:
        v = stack[-1]
        found = None
        i = cursor[v]
        slots = adjacency[v]
        while i < len(slots):
            if not slots[i][2]:
                found = slots[i]
                break
            i += 1
        cursor[v] = i
        if found is None:
            trail.append(stack.pop())
        else:
            found[2] = True
            stack.append(found[0] + found[1] - v)
    trail.reverse()
    return trail


def shortcut(g: GraphicalTwoMatching, inst: MetricInstance) -> TwoMatching:
    """Shortcut a valid graphical 2-matching to a plain 2-matching.

    Each support component is traversed by an Eulerian circuit (all
    degrees are even) and repeated vertices are skipped, keeping first
    occurrences.  Requires the triangle inequality so skipping never
    increases cost; the exact cost comparison is asserted by callers.

    Raises:
        PreconditionError: On a non-metric instance or an invalid input.
    """
    if not inst.metric:
        raise PreconditionError("shortcutting requires the triangle "
                                "inequality")
    violation = validate_g2m(g)
    if violation is not None:
        raise PreconditionError(f"invalid graphical 2-matching: {violation}")
    adjacency: dict[int, set[int]] = {v: set() for v in g.vertices}
    for (i, j) in g.multiplicity:
        adjacency[i].add(j)
        adjacency[j].add(i)
    seen: set[int] = set()
    cycles = []
    for start in sorted(g.vertices):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        component = []
        while stack:
            v = stack.pop()
            component.append(v)
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        trail = _euler_circuit(sorted(component), g.multiplicity)
        cycle = []
        visited: set[int] = set()
        for v in trail:
            if v not in visited:
                visited.add(v)
                cycle.append(v)
        cycles.append(tuple(cycle))
    return TwoMatching(tuple(cycles))
