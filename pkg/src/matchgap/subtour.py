"""The subtour relaxation, solved by cutting planes with exact separation.

The LP starts from the degree equalities and [0, 1] bounds; violated
cut constraints ``x(delta(S)) >= 2`` are found by an exact global
minimum cut of the support graph (Stoer-Wagner over rationals) and
added one per round.  Sets with at most two vertices on either side are
never violated once the degree constraints hold (for a single vertex
the cut equals 2; for a pair it equals ``4 - 2 x(e) >= 2``), so every
violated cut automatically satisfies ``3 <= |S| <= n - 3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import InvariantError, PreconditionError
from .instances import MetricInstance
from .lp import LinearProgram, solve_lp
from .rational import Rat, ZERO

EdgeKey = tuple[int, int]
TWO = Rat(2)


@dataclass(frozen=True)
class SubtourSolution:
    """Exact optimum of the subtour relaxation with its cut pool.

    ``objective_trace`` records the LP objective after each cutting
    round; it is nondecreasing since the feasible region only shrinks.
    """

    n: int
    values: dict[EdgeKey, Rat]          # support edges only
    objective: Rat
    cut_pool: tuple[frozenset[int], ...]
    objective_trace: tuple[Rat, ...] = ()

    def value(self, i: int, j: int) -> Rat:
        return self.values.get((min(i, j), max(i, j)), ZERO)

    def support(self) -> list[EdgeKey]:
        return sorted(self.values)


def stoer_wagner_min_cut(
        vertices: list[int],
        weighted_edges: dict[EdgeKey, Rat]) -> tuple[frozenset[int], Rat]:
    """Exact global minimum cut of a connected weighted graph.

    Deterministic: maximum-adjacency order breaks ties on the smallest
    vertex, and the first minimum found is kept.

    Raises:
        PreconditionError: On negative weights or fewer than 2 vertices.
    """
    if len(vertices) < 2:
        raise PreconditionError("minimum cut needs at least 2 vertices")
    if any(w < 0 for w in weighted_edges.values()):
        raise PreconditionError("minimum cut needs nonnegative weights")
    weight: dict[int, dict[int, Rat]] = {v: {} for v in vertices}
    for (i, j), w in weighted_edges.items():
        weight[i][j] = weight[i].get(j, ZERO) + w
        weight[j][i] = weight[j].get(i, ZERO) + w
    groups: dict[int, frozenset[int]] = {v: frozenset([v]) for v in vertices}
    active = sorted(vertices)
    best_cut: frozenset[int] | None = None
    best_value: Rat | None = None
    while len(active) > 1:
        # One maximum-adjacency phase.
        order = [active[0]]
        in_order = {active[0]}
        attachment = {v: weight[order[0]].get(v, ZERO) for v in active
                      if v != order[0]}
        while len(order) < len(active):
            pick = None
            for v in active:
                if v in in_order:
                    continue
                if pick is None or attachment[v] > attachment[pick] or (
                        attachment[v] == attachment[pick] and v < pick):
                    pick = v
            order.append(pick)
            in_order.add(pick)
            for v, w in weight[pick].items():
                if v in attachment and v not in in_order:
                    attachment[v] += w
        last, before = order[-1], order[-2]
        phase_value = sum((w for v, w in weight[last].items()), ZERO)
        if best_value is None or phase_value < best_value:
            best_value = phase_value
            best_cut = groups[last]
        # Merge `last` into `before`.
        for v, w in list(weight[last].items()):
            if v == before:
                continue
            weight[before][v] = weight[before].get(v, ZERO) + w
            weight[v][before] = weight[before][v]
            del weight[v][last]
        weight[before].pop(last, None)
        del weight[last]
        groups[before] = groups[before] | groups[last]
        del groups[last]
        active.remove(last)
    return best_cut, best_value


def separate_min_cut(n: int,
                     values: dict[EdgeKey, Rat]) -> tuple[frozenset[int], Rat]:
    """Global minimum cut of the support of ``values`` over n vertices.

    A disconnected support yields a zero-value cut (the component with
    the smallest vertex).  The returned side never contains vertex 0,
    so pooled cuts have a canonical orientation.
    """
    support = {key: w for key, w in values.items() if w > 0}
    adjacency: dict[int, list[int]] = {v: [] for v in range(n)}
    for i, j in support:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen: set[int] = set()
    components: list[list[int]] = []
    for start in range(n):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        components.append(sorted(comp))
    if len(components) > 1:
        side = frozenset(components[0] if 0 not in components[0]
                         else components[1])
        return side, ZERO
    cut, value = stoer_wagner_min_cut(components[0], support)
    if 0 in cut:
        cut = frozenset(components[0]) - cut
    return cut, value


def solve_subtour_lp(inst: MetricInstance) -> SubtourSolution:
    """Exact optimum of the subtour relaxation (degree + cuts + bounds).

    Iterates: solve the current LP, separate with an exact global
    minimum cut, add the violated cut, repeat.  Terminates because the
    pool only grows within a finite family; deterministic throughout.
    """
    if inst.n < 3:
        raise PreconditionError("need at least 3 vertices")
    lp = LinearProgram()
    keys: list[EdgeKey] = []
    for i, j, cost in inst.edges():
        lp.add_variable(ZERO, Rat(1), name=f"x_{i}_{j}")
        keys.append((i, j))
    index = {key: idx for idx, key in enumerate(keys)}
    for v in range(inst.n):
        coeffs = {idx: Rat(1) for idx, (i, j) in enumerate(keys)
                  if v in (i, j)}
        lp.add_constraint(coeffs, "=", TWO)
    lp.set_objective({idx: inst.cost(i, j)
                      for idx, (i, j) in enumerate(keys)})

    pool: list[frozenset[int]] = []
    trace: list[Rat] = []
    while True:
        sol = solve_lp(lp)
        if sol.status != "optimal":
            raise InvariantError(f"subtour LP reported {sol.status}")
        trace.append(sol.objective_value)
        values = {key: sol.values[idx] for key, idx in index.items()
                  if sol.values[idx] != 0}
        cut, value = separate_min_cut(inst.n, values)
        if value >= TWO:
            return SubtourSolution(inst.n, values, sol.objective_value,
                                   tuple(pool), tuple(trace))
        if not 3 <= len(cut) <= inst.n - 3:
            raise InvariantError(
                f"violated cut of size {len(cut)} contradicts the degree "
                "constraints")
        pool.append(cut)
        coeffs = {index[(min(i, j), max(i, j))]: Rat(1)
                  for i, j, _ in inst.edges()
                  if (i in cut) != (j in cut)}
        lp.add_constraint(coeffs, ">=", TWO)


def verify_subtour_feasible(
        inst: MetricInstance,
        values: dict[EdgeKey, Rat]) -> frozenset[int] | str | None:
    """Exhaustively check subtour feasibility; None when feasible.

    Returns the first violated subset, or a string describing a
    degree/bound violation.  Enumeration is limited to 16 vertices.
    """
    n = inst.n
    if n > 16:
        raise PreconditionError("exhaustive check limited to 16 vertices")
    for (i, j), x in values.items():
        if not (0 <= i < j < n):
            return f"bad edge key ({i},{j})"
        if x < 0 or x > 1:
            return f"value x({i},{j}) = {x} outside [0, 1]"
    for v in range(n):
        degree = sum((x for (i, j), x in values.items() if v in (i, j)),
                     ZERO)
        if degree != TWO:
            return f"degree {degree} != 2 at vertex {v}"
    for size in range(3, n - 2):
        for subset in combinations(range(1, n), size):
            s = set(subset)
            crossing = sum((x for (i, j), x in values.items()
                            if (i in s) != (j in s)), ZERO)
            if crossing < TWO:
                return frozenset(s)
    return None
