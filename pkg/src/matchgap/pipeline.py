"""End-to-end certified pipelines.

Each run starts from a fractional 2-matching (solved here, or injected:
the cost bounds hold for any feasible one, optimal or not), transforms
its fractional components through an auxiliary-graph construction and
an exact minimum-cost perfect matching, and returns a graphical
2-matching together with the exact ratio certificate:

* ``run_g2m43``  - cut-path gadgets, bound 4/3 (works for every
  fractional 2-matching);
* ``run_g2m109`` - all-path gadgets, bound 10/9 (requires that the
  fractional 2-matching has no cut edge; otherwise reported as not
  applicable).

The subtour-based pipeline (bound 10/9 against the subtour optimum)
lives in :mod:`matchgap.twomo`; this module re-exports it as
``run_boydcarr`` for the command-line surface.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantError
from .f2m import (F2MDecomposition, FractionalTwoMatching, decompose,
                  has_cut_edge, solve_f2m)
from .g2m import (GraphicalTwoMatching, TwoMatching, g2m_cost, shortcut,
                  two_matching_cost, validate_g2m)
from .gadgets import (build_all_path_gadgets, build_cutpath_gadgets,
                      decode_g2m, feasible_point_109, normalize_matching)
from .instances import MetricInstance
from .matching import min_cost_perfect_matching
from .rational import Rat, ZERO
from .twomo import g2m_from_subtour

BOUND_43 = Rat(4, 3)
BOUND_109 = Rat(10, 9)

run_boydcarr = g2m_from_subtour


@dataclass(frozen=True)
class TheoremRun:
    """A graphical 2-matching certified against a fractional 2-matching."""

    applicable: bool
    reason: str | None
    f2m: FractionalTwoMatching
    decomposition: F2MDecomposition
    bound_factor: Rat
    g2m: GraphicalTwoMatching | None = None
    g2m_cost_value: Rat | None = None
    two_matching: TwoMatching | None = None
    two_matching_cost_value: Rat | None = None

    @property
    def bound(self) -> Rat:
        return self.bound_factor * self.f2m.objective

    @property
    def within_bound(self) -> bool:
        return self.applicable and self.g2m_cost_value <= self.bound


def _merge_components(inst: MetricInstance, decomposition: F2MDecomposition,
                      parts: list[GraphicalTwoMatching]
                      ) -> GraphicalTwoMatching:
    mult: dict[tuple[int, int], int] = {}
    for comp in decomposition.integer_components:
        for key in comp.edges:
            mult[key] = 1
    for part in parts:
        mult.update(part.multiplicity)
    merged = GraphicalTwoMatching(tuple(range(inst.n)), mult)
    violation = validate_g2m(merged)
    if violation is not None:
        raise InvariantError(f"merged graphical 2-matching invalid: "
                             f"{violation}")
    return merged


def _finish(inst: MetricInstance, x: FractionalTwoMatching,
            decomposition: F2MDecomposition, factor: Rat,
            parts: list[GraphicalTwoMatching]) -> TheoremRun:
    merged = _merge_components(inst, decomposition, parts)
    cost = g2m_cost(merged, inst)
    tm = tm_cost = None
    if inst.metric:
        tm = shortcut(merged, inst)
        tm_cost = two_matching_cost(tm, inst)
        if tm_cost > cost:
            raise InvariantError("shortcut increased the cost")
    return TheoremRun(applicable=True, reason=None, f2m=x,
                      decomposition=decomposition, bound_factor=factor,
                      g2m=merged, g2m_cost_value=cost, two_matching=tm,
                      two_matching_cost_value=tm_cost)


def run_g2m43(inst: MetricInstance,
              f2m: FractionalTwoMatching | None = None) -> TheoremRun:
    """Certify a graphical 2-matching within 4/3 of a fractional one.

    Every fractional component passes through the cut-path-gadget
    construction; the normalized minimum-cost perfect matching then
    decodes into a valid graphical 2-matching.
    """
    x = f2m if f2m is not None else solve_f2m(inst)
    decomposition = decompose(x, inst)
    parts = []
    for comp in decomposition.fractional_components:
        gg = build_cutpath_gadgets(comp, inst)
        matching = min_cost_perfect_matching(gg.graph)
        normalized = normalize_matching(gg, matching, "exactly_one")
        parts.append(decode_g2m(gg, normalized, inst))
    return _finish(inst, x, decomposition, BOUND_43, parts)


def run_g2m109(inst: MetricInstance,
               f2m: FractionalTwoMatching | None = None) -> TheoremRun:
    """Certify within 10/9 of a fractional 2-matching when it has no
    cut edge; otherwise return a not-applicable report naming one.

    Alongside the bound itself, the run checks that the matching never
    costs more than the uniform 1/9 / 4/9 point on each gadget graph,
    which is what the 10/9 bound rests on.
    """
    x = f2m if f2m is not None else solve_f2m(inst)
    decomposition = decompose(x, inst)
    if has_cut_edge(decomposition):
        witness = next(p for comp in decomposition.fractional_components
                       for p in comp.cut_paths())
        return TheoremRun(
            applicable=False,
            reason=f"fractional 2-matching has a cut edge (path through "
                   f"{witness.vertices})",
            f2m=x, decomposition=decomposition, bound_factor=BOUND_109)
    parts = []
    for comp in decomposition.fractional_components:
        gg = build_all_path_gadgets(comp, inst)
        matching = min_cost_perfect_matching(gg.graph)
        point = feasible_point_109(gg)
        point_cost_value = sum(
            (point[e.id] * e.cost for e in gg.graph.edges), ZERO)
        if matching.total_cost > point_cost_value:
            raise InvariantError(
                f"matching cost {matching.total_cost} exceeds the "
                f"1/9-4/9 point cost {point_cost_value}")
        normalized = normalize_matching(gg, matching, "zero_or_one")
        parts.append(decode_g2m(gg, normalized, inst))
    return _finish(inst, x, decomposition, BOUND_109, parts)
