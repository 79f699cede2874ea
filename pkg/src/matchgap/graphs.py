"""Weighted multigraphs.

The multigraph is the shared currency between the matching solver and
the auxiliary-graph constructions: parallel edges are meaningful (two
constructions produce them) and costs may be negative, so edges carry
stable integer ids and exact rational costs.  Vertices are arbitrary
hashable ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import ValidationError
from .rational import Rat, ZERO

VertexId = Hashable


@dataclass(frozen=True)
class Edge:
    """An undirected edge with a stable id and an exact cost."""

    id: int
    u: VertexId
    v: VertexId
    cost: Rat

    def other(self, vertex: VertexId) -> VertexId:
        return self.v if vertex == self.u else self.u

    def endpoints(self) -> tuple[VertexId, VertexId]:
        return (self.u, self.v)


class MultiGraph:
    """An undirected multigraph with rational edge costs.

    Parallel edges are allowed and distinguished by edge id; self-loops
    are rejected.  Instances are immutable after construction and safe
    to share between threads.
    """

    def __init__(self, vertices: Iterable[VertexId],
                 edges: Iterable[tuple[VertexId, VertexId, Rat]] = ()) -> None:
        self.vertices: tuple[VertexId, ...] = tuple(vertices)
        vertex_set = set(self.vertices)
        if len(vertex_set) != len(self.vertices):
            raise ValidationError("duplicate vertex ids")
        edge_list = []
        for u, v, cost in edges:
            if u == v:
                raise ValidationError(f"self-loop at vertex {u!r}")
            if u not in vertex_set or v not in vertex_set:
                raise ValidationError(f"edge ({u!r}, {v!r}) references "
                                      "an unknown vertex")
            edge_list.append(Edge(len(edge_list), u, v, Rat(cost)))
        self.edges: tuple[Edge, ...] = tuple(edge_list)
        adjacency: dict[VertexId, list[Edge]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            adjacency[edge.u].append(edge)
            adjacency[edge.v].append(edge)
        self._adjacency = adjacency

    # -- basic queries ----------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def incident_edges(self, vertex: VertexId) -> Sequence[Edge]:
        return self._adjacency[vertex]

    def degree(self, vertex: VertexId) -> int:
        return len(self._adjacency[vertex])

    def total_cost(self) -> Rat:
        return sum((e.cost for e in self.edges), ZERO)

    def edge_by_id(self, edge_id: int) -> Edge:
        return self.edges[edge_id]

    # -- structure checks -------------------------------------------------

    def non_cubic_vertex(self) -> VertexId | None:
        """First vertex whose degree differs from 3, or None if cubic."""
        for v in self.vertices:
            if self.degree(v) != 3:
                return v
        return None

    def connected_components(self) -> list[list[VertexId]]:
        """Components in deterministic order (by first-seen vertex)."""
        seen: set[VertexId] = set()
        components = []
        for start in self.vertices:
            if start in seen:
                continue
            stack = [start]
            seen.add(start)
            component = []
            while stack:
                v = stack.pop()
                component.append(v)
                for edge in self._adjacency[v]:
                    w = edge.other(v)
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            components.append(component)
        return components

    def bridges(self) -> list[int]:
        """Edge ids of all bridges (cut edges).

        Parallel-edge aware: a pair of parallel edges is never a bridge.
        Iterative lowpoint computation so deep gadget graphs cannot hit
        the recursion limit.
        """
        index: dict[VertexId, int] = {}
        low: dict[VertexId, int] = {}
        result: list[int] = []
        counter = 0
        for root in self.vertices:
            if root in index:
                continue
            # Stack entries: (vertex, incoming edge id, iterator position).
            stack: list[tuple[VertexId, int, int]] = [(root, -1, 0)]
            index[root] = low[root] = counter
            counter += 1
            while stack:
                v, in_edge, pos = stack.pop()
                edges_v = self._adjacency[v]
                advanced = False
                while pos < len(edges_v):
                    edge = edges_v[pos]
                    pos += 1
                    w = edge.other(v)
                    if w not in index:
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append((v, in_edge, pos))
                        stack.append((w, edge.id, 0))
                        advanced = True
                        break
                    if edge.id != in_edge:
                        low[v] = min(low[v], index[w])
                if not advanced and stack:
                    parent, parent_in, parent_pos = stack[-1]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > index[parent]:
                        result.append(in_edge)
        return sorted(result)

    def two_edge_connectivity_witness(self) -> str | None:
        """None if 2-edge-connected, else a human-readable witness."""
        components = self.connected_components()
        if len(components) > 1:
            return f"disconnected: component {sorted(map(repr, components[0]))}"
        bridges = self.bridges()
        if bridges:
            edge = self.edges[bridges[0]]
            return f"bridge edge {edge.id} = ({edge.u!r}, {edge.v!r})"
        return None

    # -- export ------------------------------------------------------------

    def to_dot(self, edge_labels: dict[int, str] | None = None) -> str:
        """Render as a Graphviz ``graph`` (debugging aid)."""
        lines = ["graph g {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for edge in self.edges:
            label = f"{edge.cost}"
            if edge_labels and edge.id in edge_labels:
                label = f"{edge_labels[edge.id]} ({edge.cost})"
            lines.append(f'  "{edge.u}" -- "{edge.v}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def build_graph(num_vertices: int,
                edges: Iterable[tuple[int, int, Rat]]) -> MultiGraph:
    """Convenience constructor over vertices ``0..num_vertices-1``."""
    return MultiGraph(range(num_vertices), edges)
