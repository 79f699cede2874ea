"""Auxiliary cubic graphs whose perfect matchings encode graphical
2-matching modifications of a fractional component.

Three constructions share this module:

* ``build_contracted`` replaces every path by a single edge (requires
  that no path is a cut path);
* ``build_cutpath_gadgets`` additionally replaces each cut path and its
  two endpoints by a six-vertex gadget whose three *pattern edges* carry
  the cost of installing one of three doubling patterns on the path;
* ``build_all_path_gadgets`` replaces every path by that gadget, with
  the path cost subtracted from each pattern edge.

In all three, cycle edges appear with negated cost, so the cost of the
decoded graphical 2-matching always equals (path cost + cycle cost) plus
the matching cost.

A *pattern* deletes the path edges at positions congruent to a fixed
offset modulo 3 and doubles the rest, leaving groups of at most three
consecutive vertices.  An endpoint whose group has fewer than three
vertices needs its two incident cycle edges in the decoded object; the
gadget wires the middle chain vertex to the unique pattern that does not
need them.  For paths shorter than three edges no pattern has a
three-vertex group at an endpoint; the wiring then falls back to the
doubling patterns (offsets 2 and 1), which decode correctly because the
doubled short path covers the endpoint with degree 2 by itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InvariantError, PreconditionError
from .f2m import FractionalComponent, PathChain
from .graphs import MultiGraph, VertexId
from .instances import MetricInstance
from .matching import PerfectMatching
from .g2m import GraphicalTwoMatching, validate_g2m
from .rational import Rat, ZERO

PATTERN_OFFSETS = (2, 0, 1)     # ordered by first group size: 3, 1, 2


@dataclass(frozen=True)
class Pattern:
    """One of the three ways to delete every third edge of a path."""

    offset: int
    multiplicities: tuple[int, ...]     # per path-edge position: 0 or 2
    first_group_size: int
    last_group_size: int
    needs_first_cycle_edges: bool
    needs_last_cycle_edges: bool
    cost_in_graph: Rat                  # doubled edges, counted twice
    signed_cost: Rat                    # doubled once minus removed once


def make_patterns(costs: Sequence[Rat]) -> tuple[Pattern, Pattern, Pattern]:
    """The three patterns for a path with the given edge costs.

    Identities (exact, for every length and every cost vector): the
    three ``cost_in_graph`` values sum to four times the path cost, the
    three ``signed_cost`` values sum to the path cost, and every
    pairwise sum of signed costs is nonnegative.
    """
    ell = len(costs)
    if ell < 1:
        raise PreconditionError("a path has at least one edge")
    patterns = []
    for offset in PATTERN_OFFSETS:
        removed = [p for p in range(ell) if p % 3 == offset]
        mult = tuple(0 if p % 3 == offset else 2 for p in range(ell))
        if removed:
            first_group = removed[0] + 1
            last_group = ell - removed[-1]
        else:
            first_group = last_group = ell + 1
        doubled = sum((c for p, c in enumerate(costs) if mult[p]), ZERO)
        removed_cost = sum((c for p, c in enumerate(costs) if not mult[p]),
                           ZERO)
        patterns.append(Pattern(
            offset=offset,
            multiplicities=mult,
            first_group_size=first_group,
            last_group_size=last_group,
            needs_first_cycle_edges=first_group < 3,
            needs_last_cycle_edges=last_group < 3,
            cost_in_graph=2 * doubled,
            signed_cost=doubled - removed_cost,
        ))
    return tuple(patterns)


def middle_offsets(patterns: Sequence[Pattern]) -> tuple[int, int]:
    """Pattern offsets wired to the middle chain vertex at each endpoint.

    The middle gets the pattern whose group at that endpoint has size
    three.  For paths of one or two edges no such pattern may exist; the
    fallback picks the doubling patterns (offset 2 first, offset 1 last),
    which keep the decoded object valid.
    """
    firsts = [p.offset for p in patterns if p.first_group_size == 3]
    lasts = [p.offset for p in patterns if p.last_group_size == 3]
    if len(firsts) > 1 or len(lasts) > 1:
        raise InvariantError("group-of-three pattern is not unique")
    return (firsts[0] if firsts else 2, lasts[0] if lasts else 1)


@dataclass(frozen=True)
class EdgeProvenance:
    kind: str                            # 'cycle' | 'path' | 'pattern' | 'zero'
    cycle_edge: tuple[int, int] | None = None
    path_id: int | None = None
    pattern_offset: int | None = None
    zero_position: tuple | None = None   # (path_id, side, slot)


@dataclass(frozen=True)
class GadgetInfo:
    path_id: int
    patterns: dict[int, Pattern]              # by offset
    pattern_edge_ids: dict[int, int]          # offset -> edge id
    zero_edge_ids: dict[tuple[str, int], int]  # (side, slot 0|1) -> edge id
    chains: dict[str, tuple[VertexId, VertexId, VertexId]]
    middle: tuple[int, int]                   # (first offset, last offset)
    attach_index: dict[tuple[str, int], int]  # (side, offset) -> chain index


@dataclass(frozen=True)
class GadgetGraph:
    construction: str                    # 'contracted' | 'cutpath' | 'allpath'
    component: FractionalComponent
    graph: MultiGraph
    provenance: dict[int, EdgeProvenance]
    gadgets: dict[int, GadgetInfo]
    contracted_path_edges: dict[int, int]

    @property
    def path_cost(self) -> Rat:
        return self.component.path_cost

    @property
    def cycle_cost(self) -> Rat:
        return self.component.cycle_cost

    def pattern_edge_ids(self) -> set[int]:
        ids: set[int] = set()
        for info in self.gadgets.values():
            ids.update(info.pattern_edge_ids.values())
        return ids


class _Builder:
    def __init__(self) -> None:
        self.vertices: list[VertexId] = []
        self.edges: list[tuple[VertexId, VertexId, Rat]] = []
        self.provenance: list[EdgeProvenance] = []

    def add_vertex(self, v: VertexId) -> None:
        self.vertices.append(v)

    def add_edge(self, u: VertexId, v: VertexId, cost: Rat,
                 prov: EdgeProvenance) -> int:
        self.edges.append((u, v, cost))
        self.provenance.append(prov)
        return len(self.edges) - 1


def _path_edge_costs(path: PathChain, inst: MetricInstance) -> list[Rat]:
    return [inst.cost(a, b) for a, b in path.edges]


def _build(comp: FractionalComponent, inst: MetricInstance,
           gadget_path_ids: set[int], construction: str) -> GadgetGraph:
    builder = _Builder()
    signed = construction == "allpath"

    # Chains replace the endpoints of gadgetized paths.
    endpoint_side: dict[int, tuple[int, str]] = {}
    for path in comp.paths:
        if path.id not in gadget_path_ids:
            continue
        for side, vertex in (("first", path.vertices[0]),
                             ("last", path.vertices[-1])):
            if vertex in endpoint_side:
                raise InvariantError(f"vertex {vertex} ends two paths")
            endpoint_side[vertex] = (path.id, side)

    cycle_vertices = [v for cycle in comp.cycles for v in cycle.vertices]
    chains: dict[tuple[int, str], tuple[VertexId, VertexId, VertexId]] = {}
    for v in cycle_vertices:
        if v in endpoint_side:
            path_id, side = endpoint_side[v]
            chain = tuple(("g", path_id, side, k) for k in range(3))
            chains[(path_id, side)] = chain
            for node in chain:
                builder.add_vertex(node)
        else:
            builder.add_vertex(v)

    gadgets: dict[int, GadgetInfo] = {}
    contracted: dict[int, int] = {}
    for path in comp.paths:
        if path.id in gadget_path_ids:
            costs = _path_edge_costs(path, inst)
            patterns = make_patterns(costs)
            by_offset = {p.offset: p for p in patterns}
            mid_first, mid_last = middle_offsets(patterns)
            chain_first = chains[(path.id, "first")]
            chain_last = chains[(path.id, "last")]
            zero_ids: dict[tuple[str, int], int] = {}
            for side, chain in (("first", chain_first), ("last", chain_last)):
                for slot in range(2):
                    eid = builder.add_edge(
                        chain[slot], chain[slot + 1], ZERO,
                        EdgeProvenance("zero",
                                       zero_position=(path.id, side, slot)))
                    zero_ids[(side, slot)] = eid
            attach: dict[tuple[str, int], int] = {}
            for side, mid in (("first", mid_first), ("last", mid_last)):
                outer_offsets = sorted(o for o in PATTERN_OFFSETS if o != mid)
                attach[(side, mid)] = 1
                attach[(side, outer_offsets[0])] = 0
                attach[(side, outer_offsets[1])] = 2
            pattern_ids: dict[int, int] = {}
            for offset in PATTERN_OFFSETS:
                pattern = by_offset[offset]
                cost = pattern.signed_cost if signed else pattern.cost_in_graph
                eid = builder.add_edge(
                    chain_first[attach[("first", offset)]],
                    chain_last[attach[("last", offset)]],
                    cost,
                    EdgeProvenance("pattern", path_id=path.id,
                                   pattern_offset=offset))
                pattern_ids[offset] = eid
            gadgets[path.id] = GadgetInfo(
                path_id=path.id, patterns=by_offset,
                pattern_edge_ids=pattern_ids, zero_edge_ids=zero_ids,
                chains={"first": chain_first, "last": chain_last},
                middle=(mid_first, mid_last), attach_index=attach)
        else:
            eid = builder.add_edge(
                path.endpoints[0], path.endpoints[1], path.cost,
                EdgeProvenance("path", path_id=path.id))
            contracted[path.id] = eid

    # Cycle edges, negated; endpoints rerouted onto the chain outers.
    outer_slot: dict[tuple[int, tuple[int, int]], VertexId] = {}
    for cycle in comp.cycles:
        for v in cycle.vertices:
            if v not in endpoint_side:
                continue
            keys = sorted(key for key in cycle.edges if v in key)
            if len(keys) != 2:
                raise InvariantError(f"cycle vertex {v} has {len(keys)} "
                                     "cycle edges")
            chain = chains[endpoint_side[v]]
            outer_slot[(v, keys[0])] = chain[0]
            outer_slot[(v, keys[1])] = chain[2]
    for cycle in comp.cycles:
        for key in cycle.edges:
            a, b = key
            ga = outer_slot.get((a, key), a)
            gb = outer_slot.get((b, key), b)
            builder.add_edge(ga, gb, -inst.cost(a, b),
                             EdgeProvenance("cycle", cycle_edge=key))

    graph = MultiGraph(builder.vertices, builder.edges)
    bad = graph.non_cubic_vertex()
    if bad is not None:
        raise InvariantError(f"constructed graph is not cubic at {bad!r} "
                             f"(degree {graph.degree(bad)})")
    witness = graph.two_edge_connectivity_witness()
    if witness is not None:
        raise InvariantError(f"constructed graph not 2-edge-connected: "
                             f"{witness}")
    gg = GadgetGraph(construction, comp, graph,
                     dict(enumerate(builder.provenance)), gadgets, contracted)
    _check_total_cost(gg)
    return gg


def _check_total_cost(gg: GadgetGraph) -> None:
    comp = gg.component
    total = gg.graph.total_cost()
    if gg.construction == "contracted":
        expected = comp.path_cost - comp.cycle_cost
    elif gg.construction == "cutpath":
        p2 = sum((p.cost for p in comp.paths if p.is_cut), ZERO)
        p1 = comp.path_cost - p2
        expected = p1 + 4 * p2 - comp.cycle_cost
    else:
        expected = comp.path_cost - comp.cycle_cost
    if total != expected:
        raise InvariantError(f"total cost {total} != expected {expected} "
                             f"for {gg.construction}")


def build_contracted(comp: FractionalComponent,
                     inst: MetricInstance) -> GadgetGraph:
    """Replace each path by a single edge of the path's cost.

    Raises:
        PreconditionError: If the component has a cut path (the result
            would not be 2-edge-connected).
    """
    cut = comp.cut_paths()
    if cut:
        raise PreconditionError(
            f"component has a cut path through {cut[0].vertices}")
    return _build(comp, inst, set(), "contracted")


def build_cutpath_gadgets(comp: FractionalComponent,
                          inst: MetricInstance) -> GadgetGraph:
    """Contract ordinary paths; replace each cut path by the gadget.

    Pattern edges carry the installed pattern's cost in the original
    graph (each doubled edge counted twice).
    """
    gadget_ids = {p.id for p in comp.paths if p.is_cut}
    return _build(comp, inst, gadget_ids, "cutpath")


def build_all_path_gadgets(comp: FractionalComponent,
                           inst: MetricInstance) -> GadgetGraph:
    """Replace every path by the gadget, with signed pattern costs.

    Raises:
        PreconditionError: If the component has a cut path.
        InvariantError: If the component has no path at all (impossible
            for a well-formed fractional component).
    """
    cut = comp.cut_paths()
    if cut:
        raise PreconditionError(
            f"component has a cut path through {cut[0].vertices}")
    if not comp.paths:
        raise InvariantError("fractional component without paths")
    return _build(comp, inst, {p.id for p in comp.paths}, "allpath")


# -- matching post-processing -------------------------------------------------

def normalize_matching(gg: GadgetGraph, matching: PerfectMatching,
                       mode: str) -> PerfectMatching:
    """Exchange surplus pattern edges for zero-cost chain edges.

    In ``exactly_one`` mode (cut-path construction) each gadget ends up
    with exactly one pattern edge in the matching; in ``zero_or_one``
    mode (all-path construction) with at most one.  The exchanges never
    increase the cost: dropped pattern edges in the first mode have
    nonnegative cost individually, and in the second mode pairwise sums
    of signed costs are nonnegative.

    Raises:
        InvariantError: If the matching uses a number of pattern edges
            the construction cannot produce, or an exchange is blocked.
    """
    if mode not in ("exactly_one", "zero_or_one"):
        raise PreconditionError(f"unknown mode {mode!r}")
    chosen = set(matching.edge_ids)
    if not PerfectMatching(tuple(sorted(chosen)),
                           matching.total_cost).covers(gg.graph):
        raise PreconditionError("matching does not cover the gadget graph")

    for info in gg.gadgets.values():
        offsets = sorted(o for o, eid in info.pattern_edge_ids.items()
                         if eid in chosen)
        if len(offsets) == 1 or (len(offsets) == 0 and mode == "zero_or_one"):
            continue
        if len(offsets) == 3:
            candidates = [o for o in offsets if o not in info.middle]
            if not candidates:
                raise InvariantError("no pattern edge avoids both middles")
            keep = min(candidates)
            dropped = [o for o in offsets if o != keep]
        elif len(offsets) == 2 and mode == "zero_or_one":
            dropped = offsets
        else:
            raise InvariantError(
                f"gadget for path {info.path_id} holds {len(offsets)} "
                f"pattern edges; impossible under mode {mode!r}")
        for offset in dropped:
            chosen.discard(info.pattern_edge_ids[offset])
        for side in ("first", "last"):
            slots = sorted(info.attach_index[(side, o)] for o in dropped)
            if slots not in ([0, 1], [1, 2]):
                raise InvariantError(
                    f"dropped pattern edges leave non-adjacent chain "
                    f"vertices {slots} on the {side} side")
            chosen.add(info.zero_edge_ids[(side, slots[0])])

    total = sum((gg.graph.edge_by_id(eid).cost for eid in chosen), ZERO)
    result = PerfectMatching(tuple(sorted(chosen)), total)
    if not result.covers(gg.graph):
        raise InvariantError("normalization broke the matching")
    if total > matching.total_cost:
        raise InvariantError("normalization increased the matching cost")
    return result


def decode_g2m(gg: GadgetGraph, matching: PerfectMatching,
               inst: MetricInstance) -> GraphicalTwoMatching:
    """Turn a normalized perfect matching into a graphical 2-matching.

    Includes each cycle edge not chosen by the matching, contracted
    paths once (twice when their path edge is matched), the doubling
    pattern of each matched pattern edge, and, in the all-path
    construction, the original path where a gadget matched no pattern
    edge.  The exact identity ``cost = path cost + cycle cost +
    matching cost`` is asserted.
    """
    chosen = set(matching.edge_ids)
    comp = gg.component
    mult: dict[tuple[int, int], int] = {}

    for eid, prov in gg.provenance.items():
        if prov.kind == "cycle" and eid not in chosen:
            mult[prov.cycle_edge] = 1

    paths_by_id = {p.id: p for p in comp.paths}
    for path_id, eid in gg.contracted_path_edges.items():
        base = 2 if eid in chosen else 1
        for key in paths_by_id[path_id].edges:
            mult[key] = base

    for path_id, info in gg.gadgets.items():
        path = paths_by_id[path_id]
        offsets = [o for o, eid in info.pattern_edge_ids.items()
                   if eid in chosen]
        if len(offsets) > 1:
            raise PreconditionError("matching not normalized: gadget for "
                                    f"path {path_id} holds {len(offsets)} "
                                    "pattern edges")
        if offsets:
            pattern = info.patterns[offsets[0]]
            for idx, key in enumerate(path.edges):
                if pattern.multiplicities[idx]:
                    mult[key] = 2
        else:
            if gg.construction != "allpath":
                raise InvariantError(
                    f"gadget for path {path_id} matched no pattern edge in "
                    f"the {gg.construction} construction")
            for key in path.edges:
                mult[key] = 1

    result = GraphicalTwoMatching(tuple(comp.vertices), mult)
    violation = validate_g2m(result)
    if violation is not None:
        raise InvariantError(f"decoded object is not a graphical "
                             f"2-matching: {violation}")
    cost = sum((inst.cost(i, j) * m for (i, j), m in mult.items()), ZERO)
    # Paths enter the base cost unless the construction priced them into
    # its pattern edges outright (the cut-path gadget does; the all-path
    # gadget subtracts the path cost instead, putting it back here).
    base_paths = comp.path_cost
    if gg.construction == "cutpath":
        base_paths -= sum((paths_by_id[pid].cost for pid in gg.gadgets),
                          ZERO)
    expected = base_paths + comp.cycle_cost + matching.total_cost
    if cost != expected:
        raise InvariantError(f"decode cost {cost} != base paths + cycles "
                             f"+ matching = {expected}")
    return result


def gadget_graph_to_dot(gg: GadgetGraph) -> str:
    """Graphviz rendering with provenance labels (debugging aid)."""
    labels = {}
    for eid, prov in gg.provenance.items():
        if prov.kind == "cycle":
            labels[eid] = f"cycle{prov.cycle_edge}"
        elif prov.kind == "path":
            labels[eid] = f"path{prov.path_id}"
        elif prov.kind == "pattern":
            labels[eid] = f"pattern{prov.path_id}.{prov.pattern_offset}"
        else:
            labels[eid] = f"zero{prov.zero_position}"
    return gg.graph.to_dot(labels)


def feasible_point_109(gg: GadgetGraph) -> dict[int, Rat]:
    """The 1/9 (pattern) / 4/9 (everything else) matching-LP point.

    Only defined for the all-path construction.  Its cost equals
    ``path_cost/9 - 4*cycle_cost/9`` exactly, which is asserted, and it
    is feasible for the matching LP on the gadget graph (testable by
    odd-set enumeration at small sizes).
    """
    if gg.construction != "allpath":
        raise PreconditionError("the 1/9-4/9 point belongs to the all-path "
                                "construction")
    ninth = Rat(1, 9)
    four_ninths = Rat(4, 9)
    pattern_ids = gg.pattern_edge_ids()
    point = {e.id: (ninth if e.id in pattern_ids else four_ninths)
             for e in gg.graph.edges}
    cost = sum((point[e.id] * e.cost for e in gg.graph.edges), ZERO)
    expected = gg.path_cost / 9 - 4 * gg.cycle_cost / 9
    if cost != expected:
        raise InvariantError(f"point cost {cost} != P/9 - 4C/9 = {expected}")
    return point
